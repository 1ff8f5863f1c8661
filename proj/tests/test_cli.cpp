#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "cli_commands.hpp"
#include "patrol/io.hpp"
#include "patrol/metrics.hpp"
#include "patrol/terrain.hpp"

namespace fs = std::filesystem;
using patrol::cli::run_cli;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "patrol_cli_test" / name;
  fs::remove_all(p);
  return p;
}

std::string map10() { return patrol::cli::bundled_map("grid10_h1.json").string(); }

}  // namespace

TEST_CASE("gen-map") {
  const fs::path dir = scratch("gen");
  CHECK(cli({"gen-map", "--rows", "20", "--cols", "20", "--hotspots", "3", "--seed", "7", "--out", (dir / "a.json").string()}).code == 0);
  CHECK(cli({"gen-map", "--rows", "20", "--cols", "20", "--hotspots", "3", "--seed", "7", "--out", (dir / "b.json").string()}).code == 0);
  CHECK(patrol::read_text_file(dir / "a.json") == patrol::read_text_file(dir / "b.json"));

  const Run bad = cli({"gen-map", "--rows", "0", "--out", (dir / "c.json").string()});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("InvalidSpec") != std::string::npos);

  const Run dense = cli({"gen-map", "--density", "1", "--out", (dir / "d.json").string()});
  CHECK(dense.code == 0);
  CHECK(dense.out.find("edges\t760\n") != std::string::npos);
  CHECK(cli({"gen-map", "--bogus"}).code == 2);
  CHECK(cli({}).code == 2);
}

TEST_CASE("bundled maps load") {
  for (const char* name : {"grid20_h3.json", "grid10_h1.json", "grid5_h1.json"}) {
    const auto graph = patrol::skeletonize(patrol::load_map(patrol::cli::bundled_map(name)));
    CHECK(patrol::component_count(graph) == 1);
  }
}

TEST_CASE("simulate") {
  const fs::path dir = scratch("sim");
  const Run best = cli({"simulate", "--policy", "greedy", "--start", "best", "--runs", "5", "--out-dir", dir.string()});
  REQUIRE(best.code == 0);
  CHECK(patrol::load_report(dir / "report.json").entropy == 0.0);
  CHECK(best.out.find("\t0.00\n") != std::string::npos);
  CHECK(fs::exists(dir / "episodes" / "episode_0004.json"));
  CHECK(fs::exists(dir / "heatmap.tsv"));
  CHECK(fs::exists(dir / "config.json"));
  const auto table = patrol::parse_table(patrol::read_text_file(dir / "report.tsv"));
  CHECK(table.rows.size() == 1);

  const fs::path one = scratch("sim1");
  CHECK(cli({"simulate", "--policy", "random", "--runs", "1", "--out-dir", one.string()}).code == 0);
  CHECK(std::distance(fs::directory_iterator(one / "episodes"), fs::directory_iterator{}) == 1);

  const fs::path pol = scratch("badpolicy");
  patrol::write_text_file(pol / "p.json", R"({"format": "patrol-policy", "version": 1, "schema": "x",
    "schema_hash": "0000000000000000", "policy": [], "value": []})");
  CHECK(cli({"simulate", "--policy", "trained:" + (pol / "p.json").string(), "--out-dir", pol.string()}).code == 3);
  CHECK(cli({"simulate", "--map", (pol / "missing.json").string(), "--out-dir", pol.string()}).code == 3);
  CHECK(cli({"simulate", "--policy", "bogus", "--out-dir", pol.string()}).code == 2);
  CHECK(cli({"simulate", "--agents", "1000", "--out-dir", pol.string()}).code == 2);
}

TEST_CASE("train and evaluate") {
  const fs::path dir = scratch("train");
  CHECK(cli({"train", "--map", map10(), "--total-updates", "0", "--out-dir", (dir / "zero").string()}).code == 0);
  const Run zero_eval = cli({"simulate", "--map", map10(), "--runs", "3", "--policy",
                             "trained:" + (dir / "zero" / "policy.json").string(), "--out-dir", (dir / "zs").string()});
  CHECK(zero_eval.code == 0);

  CHECK(cli({"train", "--map", map10(), "--out-dir", (dir / "a").string()}).code == 0);
  const std::string curve = patrol::read_text_file(dir / "a" / "curve.csv");
  CHECK(std::count(curve.begin(), curve.end(), '\n') == 301);

  const Run cmp = cli({"evaluate", "--policy", "greedy", "--policy", "random", "--runs", "30", "--agents", "5",
                       "--out-dir", (dir / "cmp").string()});
  REQUIRE(cmp.code == 0);
  const auto table = patrol::parse_table(patrol::read_text_file(dir / "cmp" / "evaluation.tsv"));
  REQUIRE(table.rows.size() == 2);
  CHECK(table.rows[0].coverage[0] >= table.rows[1].coverage[0]);

  const Run single = cli({"evaluate", "--policy", "random", "--runs", "3", "--start", "random", "--start", "best",
                          "--agents", "2", "--agents", "3", "--out-dir", (dir / "grid").string()});
  CHECK(patrol::parse_table(single.out).rows.size() == 4);
  const Run alone = cli({"evaluate", "--policy", "greedy", "--runs", "3", "--out-dir", (dir / "one").string()});
  CHECK(patrol::parse_table(alone.out).rows.size() == 1);
  CHECK(cli({"evaluate", "--runs", "3", "--out-dir", (dir / "none").string()}).code == 2);
  CHECK(cli({"evaluate", "--policy", "random", "--pooled", "--runs", "3", "--out-dir", (dir / "pool").string()}).code == 0);
}

TEST_CASE("config file with flag precedence") {
  const fs::path dir = scratch("cfg");
  patrol::write_text_file(dir / "run.ini", "[simulate]\nruns=2\npolicy=random\nagents=3\n");
  const Run r = cli({"--config", (dir / "run.ini").string(), "simulate", "--agents", "4", "--out-dir", (dir / "o").string()});
  REQUIRE(r.code == 0);
  const auto table = patrol::parse_table(r.out);
  CHECK(table.rows[0].policy == "random");
  CHECK(table.rows[0].patrols == 4);
  CHECK(patrol::load_report(dir / "o" / "report.json").num_runs == 2);
  CHECK(cli({"--config", (dir / "missing.ini").string(), "simulate"}).code == 2);
}
