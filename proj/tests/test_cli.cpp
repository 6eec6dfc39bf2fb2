#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "alexkit/cli.hpp"
#include "alexkit/error.hpp"
#include "alexkit/io.hpp"
#include "alexkit/parallel.hpp"

using namespace alexkit;
namespace fs = std::filesystem;
using cli::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path(ALEXKIT_TEST_DATA) / "cli";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "alexkit");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli::main(static_cast<int>(argv.size()), argv.data());
}

cli::RunConfig gen12() {
  cli::RunConfig c;
  c.command = cli::Command::gen;
  c.params = {{"model", "polygon"}, {"n", 12}, {"h", 0.02}};
  return c;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("command names round trip") {
    for (const auto c : {cli::Command::gen, cli::Command::validate, cli::Command::strain, cli::Command::chart,
                         cli::Command::qcheck, cli::Command::flow, cli::Command::dim, cli::Command::vol,
                         cli::Command::glue, cli::Command::converge})
      CHECK(cli::parse_command(cli::to_string(c)) == c);
    CHECK_FALSE(cli::parse_command("nonsense").has_value());
  }

  TEST_CASE("gen is deterministic and versioned") {
    const auto a = cli::execute(gen12());
    const auto b = cli::execute(gen12());
    CHECK(a.report.dump() == b.report.dump());
    CHECK(a.report["schema_version"] == 1);
    CHECK(a.report.contains("provenance"));

    auto cfg = gen12();
    cfg.out_path = scratch("twelve.json").string();
    cli::write_outputs(cfg, a);
    const std::string first = slurp(cfg.out_path);
    cli::write_outputs(cfg, b);
    CHECK(slurp(cfg.out_path) == first);
  }

  TEST_CASE("reports embed the resolved config") {
    auto g = gen12();
    g.out_path = scratch("twelve.json").string();
    cli::write_outputs(g, cli::execute(g));

    cli::RunConfig dim;
    dim.command = cli::Command::dim;
    dim.space_path = g.out_path;
    dim.params = {{"subset", "boundary"}, {"delta", 0.1}};
    const auto r = cli::execute(dim);
    CHECK(r.status == 0);
    CHECK(r.report["version"] == io::version());
    CHECK(r.report["schema_version"] == 1);
    CHECK(r.report["config"]["params"]["delta"] == 0.1);
    CHECK(r.report["config"]["params"].contains("ell"));
    CHECK(r.report["outputs"]["strainer_number"] == 1);
    CHECK(std::abs(r.report["outputs"]["packing_dim"].get<double>() - 1.0) <= 0.15);
    CHECK_FALSE(r.csv.empty());
  }

  TEST_CASE("config parsing names the offending key") {
    CHECK_THROWS_WITH_AS(cli::config_from_json(json{{"space", "x.json"}}), doctest::Contains("command"), RefusalError);
    CHECK_THROWS_WITH_AS(cli::config_from_json(json{{"command", "dim"}}), doctest::Contains("space"), RefusalError);
    CHECK_THROWS_WITH_AS(cli::config_from_json(json{{"command", "gen"}, {"colour", 1}}), doctest::Contains("colour"),
                         RefusalError);
    auto bad = gen12();
    bad.params["flavour"] = 2;
    CHECK_THROWS_WITH_AS(cli::execute(bad), doctest::Contains("flavour"), RefusalError);
  }

  TEST_CASE("parameter bounds") {
    auto g = gen12();
    g.out_path = scratch("twelve.json").string();
    cli::write_outputs(g, cli::execute(g));
    cli::RunConfig c;
    c.command = cli::Command::strain;
    c.space_path = g.out_path;
    c.params = {{"subset", "boundary"}, {"k", 1}, {"delta", 0.5}, {"ell", 0.05}};
    CHECK_THROWS_WITH_AS(cli::execute(c), doctest::Contains("delta"), RefusalError);
    c.params["delta"] = 0.1;
    c.params["ell"] = 2.0;
    CHECK_THROWS_WITH_AS(cli::execute(c), doctest::Contains("ell"), RefusalError);
    c.params["ell"] = -0.1;
    CHECK_THROWS_AS(cli::execute(c), RefusalError);
  }

  TEST_CASE("validate reports failures with status 2") {
    const fs::path path = scratch("broken.json");
    auto doc = io::space_to_json(Space::from_matrix("broken", 0.0, 3, {0, 1, 5, 1, 0, 1, 5, 1, 0}));
    io::write_json(path, doc);
    cli::RunConfig c;
    c.command = cli::Command::validate;
    c.space_path = path.string();
    CHECK(cli::execute(c).status == 2);
    c.command = cli::Command::vol;
    c.params = {{"subset", "all"}, {"m", 1}, {"eps", 0.5}};
    CHECK_THROWS_AS(cli::execute(c), RefusalError);
  }

  TEST_CASE("exit codes") {
    const fs::path missing = scratch("missing-key.json");
    std::ofstream(missing) << R"({"space": "twelve.json", "params": {}})";
    CHECK(run({"run", "--config", missing.string()}) == 2);
    CHECK(run({"run", "--config", scratch("does-not-exist.json").string()}) == 2);
    CHECK(run({"frobnicate"}) == 2);
    const fs::path out = scratch("cli-gen.json");
    CHECK(run({"gen", "square", "--h", "0.1", "--out", out.string()}) == 0);
    CHECK(fs::exists(out));
    CHECK(run({"dim", "--space", out.string(), "--subset", "nowhere"}) == 2);
  }

  TEST_CASE("thread count falls back to the environment") {
    const fs::path out = scratch("threads.json");
    ::setenv("ALEXKIT_THREADS", "3", 1);
    CHECK(run({"gen", "segment", "--h", "0.1", "--out", out.string()}) == 0);
    if (parallel::openmp_enabled()) CHECK(parallel::max_threads() == 3);
    const std::string with_three = slurp(out);
    CHECK(run({"--threads", "1", "gen", "segment", "--h", "0.1", "--out", out.string()}) == 0);
    if (parallel::openmp_enabled()) CHECK(parallel::max_threads() == 1);
    CHECK(slurp(out) == with_three);
    ::unsetenv("ALEXKIT_THREADS");
    parallel::set_threads(0);
  }
}
