#pragma once

// The alexkit command line: every invocation becomes one RunConfig, whether it
// came from flags or from `run --config`.

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace alexkit::cli {

using json = nlohmann::ordered_json;

enum class Command { gen, validate, strain, chart, qcheck, flow, dim, vol, glue, converge };

const char* to_string(Command c);
std::optional<Command> parse_command(std::string_view s);

struct RunConfig {
  Command command = Command::gen;
  std::string space_path;           ///< empty for gen and converge
  json params = json::object();     ///< keys use underscores: search_radius, toward_dist, ...
  std::string out_path;             ///< empty: print the report to stdout
};

/// {"command", "space", "params", "out"}. Throws RefusalError naming the
/// offending key.
RunConfig config_from_json(const json& doc);

struct RunResult {
  json report;       ///< space document for gen, report envelope otherwise
  std::string csv;   ///< table output, empty when the command has none
  int status = 0;    ///< 0, or 2 when the command ran but its check failed (validate)
};

/// Runs one command. The report embeds the resolved config (defaults filled in)
/// and the library version.
RunResult execute(const RunConfig& cfg);

/// Writes the report (and the CSV next to it, same stem) or prints to stdout.
void write_outputs(const RunConfig& cfg, const RunResult& result);

/// Process entry point: 0 success, 2 refusal or usage error, 1 internal error.
int main(int argc, char** argv);

}  // namespace alexkit::cli
