#include <fstream>
#include <regex>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "fixtures.hpp"
#include "subdivlab/io.hpp"
#include "subdivlab/oracle.hpp"

using namespace subdivlab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("subdivlab_io_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

std::vector<Tiling> typed_tilings(const DefiningGraph& g, int levels, bool coalesce = false) {
  auto t = build_tilings(build_ball(g, levels + 1), levels);
  extract_rule(t, g, {coalesce});
  return t;
}

RunConfig config_for(const fs::path& input, const fs::path& out, int levels) {
  RunConfig cfg;
  cfg.input = input;
  cfg.out_dir = out;
  cfg.levels = levels;
  return cfg;
}

}  // namespace

TEST_CASE("counts table matches sphere sizes") {
  auto g = fixtures::triangle();
  auto t = build_tilings(build_ball(g, 3), 2);
  auto rule = extract_rule(t, g, {true});
  auto csv = counts_csv(t, rule);
  std::istringstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("level,tiles,nonideal,ideal", 0) == 0);
  auto spheres = oracle::lattice_sphere_sizes(3, 3);
  for (int n = 0; n <= 2; ++n) {
    std::string row;
    std::getline(in, row);
    std::vector<std::string> cols;
    std::stringstream rs(row);
    for (std::string c; std::getline(rs, c, ',');) cols.push_back(c);
    REQUIRE(cols.size() >= 3);
    CHECK(std::stoull(cols[2]) == spheres[n + 1]);
  }
}

TEST_CASE("tiling JSON round trip") {
  for (const auto& g : {fixtures::triangle(), fixtures::path_azb(), fixtures::edge_plus_point()}) {
    auto tilings = typed_tilings(g, 2);
    auto j = tilings_to_json(tilings, g);
    auto back = tilings_from_json(nlohmann::json::parse(j.dump()));
    REQUIRE(back.size() == tilings.size());
    for (std::size_t l = 0; l < back.size(); ++l) {
      CHECK(tilings_isomorphic(back[l], tilings[l]));
      CHECK(back[l].tiles.size() == tilings[l].tiles.size());
    }
  }
}

TEST_CASE("isomorphism ignores tile order but not content") {
  auto tilings = typed_tilings(fixtures::triangle(), 1);
  Tiling t = tilings[0];
  // Reverse the tile order and renumber edges.
  Tiling r = t;
  const int n = static_cast<int>(t.tiles.size());
  std::reverse(r.tiles.begin(), r.tiles.end());
  for (auto& e : r.edges) {
    int a = n - 1 - e.a, b = n - 1 - e.b;
    e.a = std::min(a, b);
    e.b = std::max(a, b);
  }
  CHECK(tilings_isomorphic(t, r));
  Tiling broken = t;
  broken.edges.pop_back();
  CHECK_FALSE(tilings_isomorphic(t, broken));
  Tiling moved = t;
  moved.tiles[0].shape.back() += 1;
  CHECK_FALSE(tilings_isomorphic(t, moved));
}

TEST_CASE("malformed tiling JSON") {
  CHECK_THROWS_AS(tiling_from_json(nlohmann::json::parse(R"({"level": 0})")), ParseError);
  CHECK_THROWS_AS(tiling_from_json(nlohmann::json::parse(
                      R"({"level": 0, "tiles": [], "edges": [[0, 1, "flat-ridge"]]})")),
                  ParseError);
  CHECK_THROWS_AS(tilings_from_json(nlohmann::json::parse("[]")), ParseError);
}

TEST_CASE("svg export") {
  auto z3 = typed_tilings(fixtures::triangle(), 1, true);
  auto svg = tiling_svg(z3[0]);
  CHECK(count(svg, "<circle class=\"tile") == z3[0].tiles.size());
  CHECK(count(svg, "class=\"legend-entry\"") == 3);
  CHECK(count(svg, "<line") == z3[0].edges.size());
  CHECK(svg == tiling_svg(z3[0]));
  SvgOptions other;
  other.seed = 7;
  CHECK(svg != tiling_svg(z3[0], other));

  auto f3 = typed_tilings(fixtures::free3(), 2);
  SvgOptions overlay;
  overlay.next_level = &f3[2];
  auto fs3 = tiling_svg(f3[1], overlay);
  CHECK(count(fs3, "<circle class=\"tile\"") == 30);
  CHECK(count(fs3, "class=\"flat-ridge\"") + count(fs3, "class=\"containment\"") == 0);
  CHECK(count(fs3, "<circle class=\"child\"") == 150);

  auto empty = tiling_svg(Tiling{});
  CHECK(empty.find("<svg") != std::string::npos);
  CHECK(empty.find("</svg>") != std::string::npos);
  CHECK(count(empty, "<circle") == 0);
}

TEST_CASE("dot export") {
  auto t = typed_tilings(fixtures::free3(), 1);
  auto dot = history_dot(t);
  CHECK(dot.rfind("digraph history {", 0) == 0);
  CHECK(count(dot, "style=dashed, color=grey") == 30);
  CHECK(count(dot, "[label=") == 36);
}

TEST_CASE("run writes requested artifacts") {
  auto dir = scratch("artifacts");
  auto in = write_file(dir / "triangle.json", fixtures::triangle().to_json_text());
  auto cfg = config_for(in, dir / "out", 3);
  cfg.exports = {"reports", "tilings", "dot", "svg"};
  std::ostringstream log;
  REQUIRE(run(cfg, log) == kExitOk);
  for (const char* f : {"report.json", "counts.csv", "tilings.json", "history.dot", "tiling-level-0.svg",
                        "tiling-level-2.svg"})
    CHECK(fs::exists(dir / "out" / f));
  auto report = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
  CHECK(report["growth"]["totals"] == nlohmann::json({26, 98, 218}));
  CHECK(report["ends"]["verdict"] == "1");
  CHECK(report["mesh"]["status"] == "counterexample");
  CHECK(report["meta"]["version"] == "0.1.0");
  CHECK(report["meta"]["graph_hash"] == fixtures::triangle().hash_hex());
  CHECK(report["meta"]["discrepancies"].contains("predecessor_mismatches"));
  CHECK(report["meta"]["discrepancies"].contains("descriptor_mismatches"));
  auto reimported = tilings_from_json(nlohmann::json::parse(slurp(dir / "out" / "tilings.json")));
  CHECK(reimported.size() == 3);
}

TEST_CASE("reports are deterministic and cache independent") {
  auto dir = scratch("determinism");
  auto in = write_file(dir / "path.json", fixtures::path_azb().to_json_text());
  std::ostringstream log;
  auto a = config_for(in, dir / "a", 3);
  auto b = config_for(in, dir / "b", 3);
  b.use_cache = false;
  REQUIRE(run(a, log) == kExitOk);
  REQUIRE(run(a, log) == kExitOk);  // warm cache
  REQUIRE(run(b, log) == kExitOk);
  CHECK(fs::exists(dir / "a" / "cache"));
  CHECK_FALSE(fs::exists(dir / "b" / "cache"));
  CHECK(slurp(dir / "a" / "report.json") == slurp(dir / "b" / "report.json"));
}

TEST_CASE("exit statuses") {
  auto dir = scratch("status");
  std::ostringstream log;
  auto bad = write_file(dir / "bad.json", "{\"generators\": [");
  CHECK(run(config_for(bad, dir / "o1", 2), log) == kExitParse);
  CHECK(run(config_for(dir / "missing.json", dir / "o2", 2), log) == kExitParse);

  auto tri = write_file(dir / "tri.json", fixtures::triangle().to_json_text());
  auto capped = config_for(tri, dir / "o3", 3);
  capped.element_cap = 50;
  capped.use_cache = false;
  CHECK(run(capped, log) == kExitCap);

  auto two_loops = write_file(dir / "two_loops.json", R"({"graph": {"generators": ["a", "b"], "edges": [["a", "b"]]},
    "vertices": ["v"], "edges": [{"from": "v", "to": "v", "label": "a"}, {"from": "v", "to": "v", "label": "b"}]})");
  auto special = config_for(two_loops, dir / "o4", 2);
  special.mode = "special";
  CHECK(run(special, log) == kExitParse);

  // One level cannot confirm stability: a warning, not a failure.
  auto shallow = config_for(tri, dir / "o5", 1);
  std::ostringstream warn;
  CHECK(run(shallow, warn) == kExitOk);
  CHECK(warn.str().find("warning") != std::string::npos);
  auto report = nlohmann::json::parse(slurp(dir / "o5" / "report.json"));
  CHECK(report["meta"]["discrepancies"]["refinement_unstable"] == true);
}

TEST_CASE("special run prunes to the lifted elements") {
  auto dir = scratch("special");
  auto in = write_file(dir / "loop.json", R"({"graph": {"generators": ["a", "b"], "edges": [["a", "b"]]},
    "vertices": ["v"], "edges": [{"from": "v", "to": "v", "label": "a", "sign": 1}], "squares": []})");
  auto cfg = config_for(in, dir / "out", 3);
  cfg.mode = "special";
  std::ostringstream log;
  REQUIRE(run(cfg, log) == kExitOk);
  auto report = nlohmann::json::parse(slurp(dir / "out" / "report.json"));
  CHECK(report["growth"]["totals"] == nlohmann::json({2, 2, 2}));
  CHECK(report["ends"]["verdict"] == "2");
  CHECK(report["special"]["lift_level_sizes"] == nlohmann::json({1, 2, 2, 2}));
  CHECK(report["special"]["containment"]["embeds"] == true);
}
