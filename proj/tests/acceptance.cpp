// Acceptance run: one PASS/FAIL line per criterion. Expected values come from
// the brute-force oracles, never from the code under test.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "subdivlab/io.hpp"
#include "subdivlab/oracle.hpp"

using namespace subdivlab;
namespace fs = std::filesystem;

namespace {

const fs::path kData = SUBDIVLAB_DATA_DIR;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

int failures = 0;

void report(int id, const std::string& name, const std::function<void(Outcome&)>& body) {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << " [exception: " << e.what() << "]";
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "PASS" : "FAIL") << " " << id << " " << name << ":" << o.detail.str()
            << " (" << std::fixed << std::setprecision(1) << secs << " s)" << std::endl;
}

struct Run {
  Ball ball;
  std::vector<Tiling> tilings;
  SubdivisionRule rule;
};

// Tilings of levels 0..levels-1 over a ball of depth `levels`.
Run run_graph(const DefiningGraph& g, int levels, bool coalesce = true) {
  Run r{build_ball(g, levels), {}, {}};
  r.tilings = build_tilings(r.ball, levels - 1);
  r.rule = extract_rule(r.tilings, g, {coalesce});
  return r;
}

DefiningGraph path_azb() { return DefiningGraph({"a", "z", "b"}, {{"a", "z"}, {"z", "b"}}); }
DefiningGraph edge_plus_point() { return DefiningGraph({"a", "b", "c"}, {{"a", "b"}}); }

DefiningGraph graph_from_mask(int d, unsigned mask) {
  std::vector<std::string> names;
  for (int i = 0; i < d; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
  std::vector<std::pair<std::string, std::string>> edges;
  int bit = 0;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j, ++bit)
      if ((mask >> bit) & 1U) edges.emplace_back(names[i], names[j]);
  return DefiningGraph(names, edges);
}

// One graph per isomorphism class on 1..4 vertices.
std::vector<DefiningGraph> all_small_graphs() {
  std::vector<DefiningGraph> out;
  for (int d = 1; d <= 4; ++d) {
    const int pairs = d * (d - 1) / 2;
    std::set<unsigned> seen;
    for (unsigned mask = 0; mask < (1U << pairs); ++mask) {
      std::vector<int> perm(d);
      std::iota(perm.begin(), perm.end(), 0);
      unsigned best = ~0U;
      do {
        unsigned m = 0;
        int bit = 0;
        for (int i = 0; i < d; ++i)
          for (int j = i + 1; j < d; ++j, ++bit) {
            if (!((mask >> bit) & 1U)) continue;
            int a = std::min(perm[i], perm[j]), b = std::max(perm[i], perm[j]);
            int pos = a * d - a * (a + 1) / 2 + (b - a - 1);
            m |= 1U << pos;
          }
        best = std::min(best, m);
      } while (std::next_permutation(perm.begin(), perm.end()));
      if (seen.insert(best).second) out.push_back(graph_from_mask(d, best));
    }
  }
  return out;
}

std::string describe(const DefiningGraph& g) {
  return std::to_string(g.size()) + "v" + std::to_string(g.edge_count()) + "e";
}

std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::vector<std::size_t> to_sizes(const std::vector<std::uint64_t>& v, std::size_t from, std::size_t n) {
  return {v.begin() + from, v.begin() + from + n};
}

}  // namespace

int main() {
  const auto triangle = DefiningGraph::complete(3);
  const auto free3 = DefiningGraph::edgeless(3);
  const auto integers = DefiningGraph::complete(1);

  report(1, "tile-type counts", [&](Outcome& o) {
    for (auto [name, g, want] : {std::tuple{"Z^3", triangle, 3}, std::tuple{"F3", free3, 1}}) {
      auto t0 = std::chrono::steady_clock::now();
      auto r = run_graph(g, 4);
      double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      auto n = r.rule.nonideal_types().size();
      o.detail << " " << name << " " << n << " types";
      o.require(r.rule.stable && static_cast<int>(n) == want, std::string(name) + " type count");
      o.require(s < 10, std::string(name) + " runtime");
    }
    auto t0 = std::chrono::steady_clock::now();
    auto r = run_graph(path_azb(), 4);
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.detail << "; F2xZ " << r.rule.level0_shape_classes << " level-0 shape classes ("
             << r.rule.nonideal_types().size() << " refined types)";
    o.require(r.rule.level0_shape_classes == 3, "F2xZ shape classes");
    o.require(s < 10, "F2xZ runtime");
  });

  report(2, "subdivision replay", [&](Outcome& o) {
    auto check = [&](const char* name, const DefiningGraph& g, const std::vector<std::uint64_t>& spheres) {
      auto r = run_graph(g, 4);
      auto ids = r.rule.nonideal_types();
      auto c = r.rule.transition();
      std::vector<long long> v;
      for (int id : ids) v.push_back(static_cast<long long>(r.rule.types[id].count_by_level[0]));
      std::vector<std::size_t> got;
      for (int step = 0; step < 4; ++step) {
        got.push_back(static_cast<std::size_t>(std::accumulate(v.begin(), v.end(), 0LL)));
        std::vector<long long> next(v.size(), 0);
        for (std::size_t i = 0; i < v.size(); ++i)
          for (std::size_t j = 0; j < v.size(); ++j) next[j] += v[i] * c[i][j];
        v = std::move(next);
      }
      auto want = to_sizes(spheres, 1, 4);
      o.detail << " " << name << " " << join(got);
      o.require(got == want, std::string(name) + " replay vs oracle " + join(want));
      return r;
    };
    auto z3 = check("Z^3", triangle, oracle::lattice_sphere_sizes(3, 4));
    // Child multisets by clique size: size k has children 1..k of each smaller size.
    for (const auto& t : z3.rule.types) {
      if (t.ideal) continue;
      int k = std::popcount(t.clique);
      std::map<int, int> by_size;
      for (auto [child, m] : t.children) by_size[std::popcount(z3.rule.types[child].clique)] += m;
      std::map<int, int> want;
      for (int j = 1; j <= k; ++j) {
        long long b = 1;
        for (int i = 1; i <= k - j; ++i) b = b * (k - i + 1) / i;  // C(k, k-j)
        want[j] = static_cast<int>(b);
      }
      o.require(by_size == want, "Z^3 child multiset for clique size " + std::to_string(k));
    }
    auto f3 = check("F3", free3, oracle::free_sphere_sizes(3, 4));
    o.require(f3.rule.types.size() == 1 && f3.rule.types[0].children == std::map<int, int>{{0, 5}},
              "F3 rule A -> 5A");
  });

  report(3, "tile count equals next sphere", [&](Outcome& o) {
    for (const auto& g : {triangle, path_azb(), free3, edge_plus_point()}) {
      auto ball = build_ball(g, 5);
      auto tilings = build_tilings(ball, 4);
      auto spheres = oracle::trace_sphere_sizes(g, 5);
      std::vector<std::size_t> got;
      for (const auto& t : tilings) got.push_back(t.nonideal_count());
      o.detail << " " << describe(g) << " " << join(got);
      o.require(got == to_sizes(spheres, 1, 5), describe(g));
    }
  });

  report(4, "oracle equivalence", [&](Outcome& o) {
    for (int d = 1; d <= 3; ++d) {
      auto sizes = build_ball(DefiningGraph::complete(d), 4).level_sizes();
      o.require(sizes == to_sizes(oracle::lattice_sphere_sizes(d, 4), 0, 5), "Z^" + std::to_string(d));
      auto fsz = build_ball(DefiningGraph::edgeless(d), 4).level_sizes();
      o.require(fsz == to_sizes(oracle::free_sphere_sizes(d, 4), 0, 5), "F" + std::to_string(d));
    }
    o.detail << " Z^d and F_k (d, k <= 3, n <= 4) agree";
    auto sizes = build_ball(path_azb(), 4).level_sizes();
    auto bfs = to_sizes(oracle::f2z_sphere_sizes(4), 0, 5);
    auto trace = to_sizes(oracle::trace_sphere_sizes(path_azb(), 4), 0, 5);
    o.detail << "; F2xZ builder " << join(sizes) << ", pair BFS " << join(bfs) << ", trace BFS "
             << join(trace);
    o.require(sizes == bfs && sizes == trace, "F2xZ builder vs exhaustive BFS");
    const std::vector<std::size_t> stated{1, 14, 62};
    o.require(std::equal(stated.begin(), stated.end(), sizes.begin()),
              "F2xZ stated values 1,14,62 (exhaustive BFS gives " + join(bfs) + ")");
  });

  report(5, "growth dichotomy", [&](Outcome& o) {
    auto z3 = run_graph(triangle, 5);
    auto gz = growth(z3.tilings, z3.rule);
    o.require(gz.classification() == "polynomial(2)", "Z^3 " + gz.classification());
    auto f3 = run_graph(free3, 5);
    auto gf = growth(f3.tilings, f3.rule);
    o.require(gf.exponential && std::abs(gf.ratio - 5.0) < 1e-6, "F3 " + gf.classification());
    auto fz = run_graph(edge_plus_point(), 5);
    auto ge = growth(fz.tilings, fz.rule);
    o.require(ge.exponential, "Z*Z^2 " + ge.classification());
    o.detail << " Z^3 " << gz.classification() << ", F3 " << gf.classification() << ", Z*Z^2 "
             << ge.classification() << ";";
    std::mt19937 rng(20240601);
    int poly = 0, expo = 0;
    for (int i = 0; i < 8; ++i) {
      int d = std::uniform_int_distribution<int>(1, 4)(rng);
      unsigned mask = std::uniform_int_distribution<unsigned>(0, (1U << (d * (d - 1) / 2)) - 1)(rng);
      auto g = graph_from_mask(d, mask);
      auto r = run_graph(g, 6);
      auto gr = growth(r.tilings, r.rule);
      auto cls = gr.classification();
      bool known = cls.rfind("polynomial(", 0) == 0 || cls.rfind("exponential(", 0) == 0;
      o.require(known, describe(g) + " gave " + cls);
      (gr.exponential ? expo : poly)++;
    }
    o.detail << " 8 random graphs (d <= 4, N = 6): " << poly << " polynomial, " << expo
             << " exponential, 0 other";
  });

  report(6, "ends", [&](Outcome& o) {
    struct Case {
      const char* name;
      DefiningGraph g;
      std::string want;
    };
    for (const auto& c : {Case{"Z^3", triangle, "1"}, Case{"F2xZ", path_azb(), "1"},
                          Case{"Z", integers, "2"}, Case{"F3", free3, "unbounded"},
                          Case{"Z*Z^2", edge_plus_point(), "unbounded"}}) {
      auto r = run_graph(c.g, 5);
      auto v = ends(r.tilings).verdict;
      std::string got = v.kind == EndsVerdict::Kind::Unbounded ? "unbounded" : v.to_string();
      o.detail << " " << c.name << "=" << got;
      o.require(got == c.want, c.name);
    }
    int checked = 0;
    for (const auto& g : all_small_graphs()) {
      auto r = run_graph(g, 4);
      bool unbounded = ends(r.tilings).verdict.kind == EndsVerdict::Kind::Unbounded;
      o.require(unbounded == !g.is_connected(), "connectivity cross-check " + describe(g));
      ++checked;
    }
    o.detail << "; unbounded iff disconnected on " << checked << " graphs (d <= 4, N = 4)";
  });

  report(7, "mesh certificate", [&](Outcome& o) {
    int certified = 0, denied = 0;
    for (const auto& g : all_small_graphs()) {
      auto r = run_graph(g, 4);
      if (!r.rule.stable) r = run_graph(g, 5);
      auto m = mesh_certificate(r.tilings, r.rule);
      if (g.size() == 1) {
        o.detail << " Z (single generator, edgeless): "
                 << (m.certified ? "certified" : "counterexample") << ", excluded;";
        continue;
      }
      if (g.edge_count() == 0) {
        o.require(m.certified, "edgeless " + describe(g));
        certified += m.certified;
      } else {
        o.require(!m.certified && !m.orbit.empty(), "with edge " + describe(g));
        denied += !m.certified && !m.orbit.empty();
      }
    }
    o.detail << " certified " << certified << " edgeless graphs, denied with orbit " << denied
             << " graphs with an edge";
  });

  report(8, "divergence", [&](Outcome& o) {
    for (auto [name, g] : {std::pair{"Z^3", triangle}, std::pair{"F2xZ", path_azb()}}) {
      auto r = run_graph(g, 5);
      auto d = divergence_diameter(r.tilings);
      std::vector<std::size_t> diam;
      for (const auto& l : d.levels) {
        o.require(l.finite && !l.bound_only, std::string(name) + " level finite");
        o.require(verify_witness(r.tilings[l.level], l), std::string(name) + " witness");
        diam.push_back(static_cast<std::size_t>(l.diameter));
      }
      o.detail << " " << name << " diam " << join(diam) << " fit " << d.fit << " (sse " << d.linear_sse
               << " vs " << d.exp_sse << ");";
      o.require(d.fit == "linear" && d.linear_sse <= 0.1 * d.exp_sse, std::string(name) + " linear fit");
    }
    auto f3 = run_graph(free3, 5);
    auto d = divergence_diameter(f3.tilings);
    for (const auto& l : d.levels)
      if (l.level >= 1) o.require(!l.finite, "F3 level " + std::to_string(l.level) + " finite");
    o.detail << " F3 infinite at levels 1.." << d.levels.size() - 1;
  });

  report(9, "special pruning", [&](Outcome& o) {
    auto loop = CubeComplexSpec::load(kData / "loop_a.json");
    const auto& g = *loop.graph;
    o.require(check_local_isometry(loop, g).ok, "loop-a local isometry");
    auto amb = run_graph(g, 6, false);
    auto lifts = lift_basepoints(loop, amb.ball, 6);
    std::size_t violations = star_convexity_violations(lifts, amb.ball).size();
    auto pruned = prune_history(amb.ball, amb.tilings, amb.rule, lifts);
    std::vector<std::size_t> counts;
    for (const auto& t : pruned.tilings) counts.push_back(t.nonideal_count());
    auto e = ends(pruned.tilings).verdict;
    o.detail << " loop-a growth " << join(counts) << " ends " << e.to_string() << ";";
    o.require(std::all_of(counts.begin(), counts.end(), [](std::size_t c) { return c == 2; }), "loop-a growth");
    o.require(e.kind == EndsVerdict::Kind::Count && e.value == 2, "loop-a ends");

    for (const auto& h : {triangle, path_azb()}) {
      auto r = run_graph(h, 4, false);
      auto full = lift_basepoints(salvetti_spec(h), r.ball, 4);
      violations += star_convexity_violations(full, r.ball).size();
      auto p = prune_history(r.ball, r.tilings, r.rule, full);
      bool same = p.rule.types.size() == r.rule.types.size() && p.rule.transition() == r.rule.transition();
      for (std::size_t l = 0; l < r.tilings.size(); ++l)
        same = same && tilings_isomorphic(p.tilings[l], r.tilings[l]);
      o.require(same, "full Salvetti identity on " + describe(h));
    }
    o.detail << " full Salvetti identity on Z^3 and F2xZ;";

    auto induced = CubeComplexSpec::load(kData / "salvetti_az_in_path.json");
    const auto& pg = *induced.graph;
    auto r = run_graph(pg, 5, false);
    auto il = lift_basepoints(induced, r.ball, 5);
    violations += star_convexity_violations(il, r.ball).size();
    auto p = prune_history(r.ball, r.tilings, r.rule, il);
    auto alone = run_graph(pg.induced(0b011), 5, false);
    std::vector<std::size_t> a, b;
    for (const auto& t : p.tilings) a.push_back(t.nonideal_count());
    for (const auto& t : alone.tilings) b.push_back(t.nonideal_count());
    auto ga = growth(p.tilings, p.rule).classification(), gb = growth(alone.tilings, alone.rule).classification();
    auto ea = ends(p.tilings).verdict.to_string(), eb = ends(alone.tilings).verdict.to_string();
    o.detail << " induced {a,z} " << join(a) << " " << ga << " ends " << ea << " vs standalone " << join(b)
             << " " << gb << " ends " << eb << "; star-convexity violations " << violations;
    o.require(a == b && ga == gb && ea == eb, "induced vs standalone");
    o.require(violations == 0, "star convexity");
  });

  report(10, "discrepancy ledger", [&](Outcome& o) {
    auto out = fs::temp_directory_path() / "subdivlab_acceptance";
    auto field = [&](const char* file, bool coalesce) {
      RunConfig cfg;
      cfg.input = kData / file;
      cfg.levels = 4;
      cfg.coalesce = coalesce;
      cfg.out_dir = out / file;
      cfg.use_cache = false;
      return compute(cfg).report;
    };
    for (const char* f : {"triangle.json", "free3.json"}) {
      auto r = field(f, true);
      auto m = r["meta"]["discrepancies"]["descriptor_mismatches"].get<std::size_t>();
      o.detail << " " << f << " descriptor mismatches " << m << ";";
      o.require(m == 0 && r["rule"]["stable"] == true, std::string(f) + " descriptor");
    }
    auto r = field("path_azb.json", true);
    const auto& disc = r["meta"]["discrepancies"];
    auto pred = disc["predecessor_mismatches"].get<std::size_t>();
    o.detail << " F2xZ predecessor mismatches " << pred << " (e.g. "
             << (disc["predecessor_examples"].empty() ? "none" : disc["predecessor_examples"][0].get<std::string>())
             << "), descriptor mismatches " << disc["descriptor_mismatches"] << ", level-0 shape classes "
             << r["rule"]["level0_shape_classes"] << ", refined types " << r["rule"]["nonideal_types"]
             << ", raw clique classes " << r["rule"]["raw_clique_classes"];
    o.require(pred > 0 && !disc["predecessor_examples"].empty(), "F2xZ predecessor mismatches reported");
    o.require(disc.contains("descriptor_mismatches") && disc.contains("refinement_unstable") &&
                  disc.contains("multi_cover"),
              "discrepancy counters present");
  });

  return failures == 0 ? 0 : 1;
}
