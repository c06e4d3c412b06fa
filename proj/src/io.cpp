#include "subdivlab/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

namespace subdivlab {

using nlohmann::json;

namespace {

json signed_set_json(const SignedSet& s) { return json::array({s.pos, s.neg}); }

SignedSet signed_set_from(const json& j) {
  return {j.at(0).get<GenMask>(), j.at(1).get<GenMask>()};
}

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json rule_json(const SubdivisionRule& rule, const DefiningGraph& g) {
  json types = json::array();
  for (const auto& t : rule.types) {
    json children = json::object();
    for (auto [c, m] : t.children) children[std::to_string(c)] = m;
    json inner = json::array();
    for (const auto& [key, count] : t.internal_edges) {
      auto [x, y, kind] = key;
      inner.push_back({x, y, to_string(static_cast<EdgeKind>(kind)), count});
    }
    types.push_back({{"id", t.id},
                     {"ideal", t.ideal},
                     {"clique", t.ideal ? "" : format_mask(g, t.clique)},
                     {"shape", t.shape},
                     {"children", children},
                     {"ideal_children", t.ideal_children},
                     {"internal_edges", inner},
                     {"count_by_level", t.count_by_level}});
  }
  return {{"types", types},
          {"nonideal_types", rule.nonideal_types().size()},
          {"stable", rule.stable},
          {"rounds", rule.rounds},
          {"typed_levels", rule.typed_levels},
          {"level0_shape_classes", rule.level0_shape_classes},
          {"raw_clique_classes", rule.raw_clique_classes},
          {"replay_ok", rule.replay_ok},
          {"replay_errors", rule.replay_errors},
          {"transition", rule.transition()}};
}

json growth_json(const std::vector<Tiling>& tilings, const SubdivisionRule& rule) {
  try {
    auto gr = growth(tilings, rule);
    return {{"totals", gr.totals},
            {"by_type", gr.by_type},
            {"recurrence", gr.recurrence},
            {"method", gr.method},
            {"exponential", gr.exponential},
            {"ratio", finite_or_null(gr.ratio)},
            {"degree", gr.degree},
            {"classification", gr.classification()}};
  } catch (const FitError& e) {
    std::vector<std::size_t> totals;
    for (const auto& t : tilings) totals.push_back(t.nonideal_count());
    return {{"totals", totals}, {"classification", "undetermined"}, {"error", e.what()}};
  }
}

json ends_json(const std::vector<Tiling>& tilings, int window) {
  auto e = ends(tilings, window);
  json bij = json::array();
  for (char b : e.bijective) bij.push_back(b != 0);
  return {{"components", e.components},
          {"parent_component", e.parent_component},
          {"bijective", bij},
          {"window", e.window},
          {"verdict", e.verdict.to_string()}};
}

json mesh_json(const std::vector<Tiling>& tilings, const SubdivisionRule& rule) {
  if (!rule.stable) return {{"status", "skipped"}, {"reason", "refinement unstable"}};
  auto m = mesh_certificate(tilings, rule);
  return {{"status", m.certified ? "certified" : "counterexample"},
          {"certified", m.certified},
          {"nodes", m.nodes},
          {"arcs", m.arcs},
          {"orbit", m.orbit},
          {"witness_level", m.witness_level},
          {"witness_tiles", m.witness_tiles}};
}

json divergence_json(const std::vector<Tiling>& tilings) {
  auto d = divergence_diameter(tilings);
  json levels = json::array();
  for (const auto& l : d.levels) {
    json entry = {{"level", l.level},
                  {"tiles", l.tiles},
                  {"finite", l.finite},
                  {"bound_only", l.bound_only}};
    if (l.finite) {
      entry["diameter"] = l.diameter;
      entry["witness"] = {{"from", l.from}, {"to", l.to}, {"path", l.path}};
      entry["witness_verified"] = verify_witness(tilings[l.level], l);
    } else {
      entry["diameter"] = "inf";
    }
    levels.push_back(entry);
  }
  return {{"levels", levels},
          {"fit", d.fit},
          {"fitted_points", d.fitted_points},
          {"linear", {{"slope", finite_or_null(d.linear_slope)},
                      {"intercept", finite_or_null(d.linear_intercept)},
                      {"sse", finite_or_null(d.linear_sse)}}},
          {"exponential", {{"rate", finite_or_null(d.exp_rate)},
                           {"scale", finite_or_null(d.exp_scale)},
                           {"sse", finite_or_null(d.exp_sse)}}}};
}

json cone_json(const std::vector<Tiling>& tilings, int depth) {
  try {
    auto c = cone_types(build_history(tilings), depth);
    return {{"depth", c.depth},
            {"classes", c.classes},
            {"per_level", c.per_level},
            {"approximate", c.approximate}};
  } catch (const std::invalid_argument& e) {
    return {{"depth", depth}, {"error", e.what()}};
  }
}

const char* kPalette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2",
                          "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"};

std::string colour(int type) {
  if (type < 0) return "#cccccc";
  return kPalette[type % (sizeof(kPalette) / sizeof(kPalette[0]))];
}

}  // namespace

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
  }
  std::filesystem::rename(tmp, path);
}

json tiling_to_json(const Tiling& t) {
  json tiles = json::array();
  for (const auto& tile : t.tiles) {
    json cells = json::array();
    for (const auto& c : tile.cells) cells.push_back(signed_set_json(c.v));
    tiles.push_back({{"owner", tile.owner},
                     {"component", tile.component},
                     {"ideal", tile.ideal},
                     {"covered", signed_set_json(tile.covered)},
                     {"cells", cells},
                     {"shape", tile.shape},
                     {"parent", tile.parent},
                     {"children", tile.children},
                     {"type", tile.type}});
  }
  json edges = json::array();
  for (const auto& e : t.edges) edges.push_back({e.a, e.b, to_string(e.kind)});
  return {{"level", t.level}, {"tiles", tiles}, {"edges", edges}};
}

Tiling tiling_from_json(const json& j) {
  try {
    Tiling t;
    t.level = j.at("level").get<int>();
    for (const auto& x : j.at("tiles")) {
      Tile tile;
      tile.level = t.level;
      tile.owner = x.at("owner").get<ElemId>();
      tile.component = x.at("component").get<int>();
      tile.ideal = x.at("ideal").get<bool>();
      tile.covered = signed_set_from(x.at("covered"));
      for (const auto& c : x.at("cells")) tile.cells.push_back({signed_set_from(c)});
      tile.shape = x.at("shape").get<std::vector<int>>();
      tile.parent = x.at("parent").get<int>();
      tile.children = x.at("children").get<std::vector<int>>();
      tile.type = x.at("type").get<int>();
      t.tiles.push_back(std::move(tile));
    }
    const int n = static_cast<int>(t.tiles.size());
    for (const auto& e : j.at("edges")) {
      TileEdge edge{e.at(0).get<int>(), e.at(1).get<int>(), EdgeKind::FlatRidge};
      if (edge.a < 0 || edge.b >= n || edge.a >= edge.b) throw ParseError("tiling edge out of range");
      std::string kind = e.at(2).get<std::string>();
      if (kind == "containment") {
        edge.kind = EdgeKind::Containment;
      } else if (kind != "flat-ridge") {
        throw ParseError("unknown edge kind \"" + kind + "\"");
      }
      t.edges.push_back(edge);
    }
    return t;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed tiling: ") + e.what());
  }
}

json tilings_to_json(const std::vector<Tiling>& tilings, const DefiningGraph& g) {
  json levels = json::array();
  for (const auto& t : tilings) levels.push_back(tiling_to_json(t));
  return {{"version", kVersion},
          {"graph", json::parse(g.to_json_text())},
          {"graph_hash", g.hash_hex()},
          {"levels", levels}};
}

std::vector<Tiling> tilings_from_json(const json& j) {
  if (!j.is_object() || !j.contains("levels")) throw ParseError("tilings file needs \"levels\"");
  std::vector<Tiling> out;
  for (const auto& l : j["levels"]) out.push_back(tiling_from_json(l));
  return out;
}

bool tilings_isomorphic(const Tiling& a, const Tiling& b) {
  if (a.tiles.size() != b.tiles.size() || a.edges.size() != b.edges.size()) return false;
  using Key = std::tuple<ElemId, int, bool, SignedSet, std::vector<CubeCell>, std::vector<int>>;
  auto key = [](const Tile& t) {
    return Key{t.owner, t.component, t.ideal, t.covered, t.cells, t.shape};
  };
  std::map<Key, int> in_b;
  for (std::size_t i = 0; i < b.tiles.size(); ++i) {
    if (!in_b.emplace(key(b.tiles[i]), static_cast<int>(i)).second) return false;
  }
  std::vector<int> to_b(a.tiles.size());
  for (std::size_t i = 0; i < a.tiles.size(); ++i) {
    auto it = in_b.find(key(a.tiles[i]));
    if (it == in_b.end()) return false;
    to_b[i] = it->second;
  }
  std::set<std::tuple<int, int, EdgeKind>> eb;
  for (const auto& e : b.edges) eb.insert({e.a, e.b, e.kind});
  for (const auto& e : a.edges) {
    auto [x, y] = std::minmax(to_b[e.a], to_b[e.b]);
    if (!eb.count({x, y, e.kind})) return false;
  }
  return true;
}

std::string counts_csv(const std::vector<Tiling>& tilings, const SubdivisionRule& rule) {
  std::ostringstream out;
  out << "level,tiles,nonideal,ideal";
  for (const auto& t : rule.types) out << ",type" << t.id << (t.ideal ? "_ideal" : "");
  out << "\n";
  for (const auto& t : tilings) {
    out << t.level << ',' << t.tiles.size() << ',' << t.nonideal_count() << ',' << t.ideal_count();
    for (const auto& tt : rule.types) {
      out << ',';
      if (t.level < static_cast<int>(tt.count_by_level.size())) out << tt.count_by_level[t.level];
    }
    out << "\n";
  }
  return out.str();
}

std::string history_dot(const std::vector<Tiling>& tilings) {
  std::ostringstream out;
  out << "digraph history {\n  rankdir=TB;\n  node [shape=circle, style=filled, fontsize=9];\n";
  auto id = [](int level, int tile) { return "L" + std::to_string(level) + "_" + std::to_string(tile); };
  for (const auto& t : tilings) {
    out << "  subgraph cluster_" << t.level << " {\n    label=\"level " << t.level << "\";\n";
    for (std::size_t i = 0; i < t.tiles.size(); ++i) {
      const Tile& tile = t.tiles[i];
      out << "    " << id(t.level, static_cast<int>(i)) << " [label=\""
          << (tile.type >= 0 ? std::to_string(tile.type) : std::string("?")) << "\", fillcolor=\""
          << (tile.ideal ? "#ffffff" : colour(tile.type)) << "\""
          << (tile.ideal ? ", style=dashed" : "") << "];\n";
    }
    for (const auto& e : t.edges) {
      out << "    " << id(t.level, e.a) << " -> " << id(t.level, e.b) << " [dir=none"
          << (e.kind == EdgeKind::Containment ? ", style=dotted" : "") << "];\n";
    }
    out << "  }\n";
  }
  for (std::size_t l = 1; l < tilings.size(); ++l) {
    for (std::size_t i = 0; i < tilings[l].tiles.size(); ++i) {
      const Tile& tile = tilings[l].tiles[i];
      if (tile.parent < 0) continue;
      out << "  " << id(static_cast<int>(l) - 1, tile.parent) << " -> "
          << id(static_cast<int>(l), static_cast<int>(i)) << " [style=dashed, color=grey];\n";
    }
  }
  out << "}\n";
  return out.str();
}

std::string tiling_svg(const Tiling& t, const SvgOptions& opts) {
  const int n = static_cast<int>(t.tiles.size());
  const double width = 800, height = 800, margin = 40;
  std::vector<double> x(n), y(n);
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    x[i] = unit(rng);
    y[i] = unit(rng);
  }
  // Fruchterman-Reingold on the unit square with a linearly cooling step.
  if (n > 1) {
    const double k = std::sqrt(1.0 / n);
    const long long budget = 20'000'000;
    int iters = static_cast<int>(std::min<long long>(opts.iterations, std::max<long long>(1, budget / (1LL * n * n))));
    for (int it = 0; it < iters; ++it) {
      std::vector<double> dx(n, 0), dy(n, 0);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
          double ux = x[i] - x[j], uy = y[i] - y[j];
          double d2 = std::max(ux * ux + uy * uy, 1e-9);
          double f = k * k / d2;
          dx[i] += ux * f, dy[i] += uy * f;
          dx[j] -= ux * f, dy[j] -= uy * f;
        }
      for (const auto& e : t.edges) {
        double ux = x[e.a] - x[e.b], uy = y[e.a] - y[e.b];
        double d = std::max(std::sqrt(ux * ux + uy * uy), 1e-9);
        double f = d / k;
        dx[e.a] -= ux * f, dy[e.a] -= uy * f;
        dx[e.b] += ux * f, dy[e.b] += uy * f;
      }
      double temp = 0.1 * (1.0 - static_cast<double>(it) / iters) + 1e-3;
      for (int i = 0; i < n; ++i) {
        double len = std::max(std::sqrt(dx[i] * dx[i] + dy[i] * dy[i]), 1e-9);
        double step = std::min(len, temp);
        x[i] = std::clamp(x[i] + dx[i] / len * step, 0.0, 1.0);
        y[i] = std::clamp(y[i] + dy[i] / len * step, 0.0, 1.0);
      }
    }
  }
  auto px = [&](double v) { return margin + v * (width - 2 * margin); };
  auto py = [&](double v) { return margin + v * (height - 2 * margin); };

  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width + 200 << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width + 200 << " " << height << "\">\n"
      << "<!-- schematic layout, seed " << opts.seed << "; positions carry no metric meaning -->\n"
      << "<title>tiling level " << t.level << "</title>\n<g class=\"edges\">\n";
  for (const auto& e : t.edges) {
    out << "<line x1=\"" << px(x[e.a]) << "\" y1=\"" << py(y[e.a]) << "\" x2=\"" << px(x[e.b])
        << "\" y2=\"" << py(y[e.b]) << "\" stroke=\"#333\""
        << (e.kind == EdgeKind::Containment ? " stroke-dasharray=\"2,3\"" : "") << " class=\""
        << to_string(e.kind) << "\"/>\n";
  }
  out << "</g>\n<g class=\"tiles\">\n";
  std::set<int> legend;
  for (int i = 0; i < n; ++i) {
    const Tile& tile = t.tiles[i];
    if (!tile.ideal) legend.insert(tile.type);
    out << "<circle class=\"tile" << (tile.ideal ? " ideal" : "") << "\" cx=\"" << px(x[i])
        << "\" cy=\"" << py(y[i]) << "\" r=\"6\" fill=\"" << (tile.ideal ? "none" : colour(tile.type))
        << "\" stroke=\"#000\"" << (tile.ideal ? " stroke-dasharray=\"3,2\"" : "") << "/>\n";
  }
  out << "</g>\n";
  if (opts.next_level) {
    out << "<g class=\"vertical\">\n";
    for (const auto& c : opts.next_level->tiles) {
      if (c.parent < 0 || c.parent >= n) continue;
      double a = 2 * M_PI * unit(rng);
      double cx = px(x[c.parent]) + 14 * std::cos(a), cy = py(y[c.parent]) + 14 * std::sin(a);
      out << "<line x1=\"" << px(x[c.parent]) << "\" y1=\"" << py(y[c.parent]) << "\" x2=\"" << cx
          << "\" y2=\"" << cy << "\" stroke=\"#999\"/>\n"
          << "<circle class=\"child\" cx=\"" << cx << "\" cy=\"" << cy << "\" r=\"3\" fill=\""
          << (c.ideal ? "none" : colour(c.type)) << "\" stroke=\"#999\"/>\n";
    }
    out << "</g>\n";
  }
  out << "<g class=\"legend\">\n";
  int row = 0;
  for (int type : legend) {
    double ly = margin + 20 * row++;
    out << "<circle class=\"legend-entry\" cx=\"" << width + 20 << "\" cy=\"" << ly << "\" r=\"6\" fill=\""
        << colour(type) << "\"/><text x=\"" << width + 32 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
        << (type >= 0 ? "type " + std::to_string(type) : std::string("untyped")) << "</text>\n";
  }
  out << "</g>\n</svg>\n";
  return out.str();
}

RunResult compute(const RunConfig& cfg) {
  if (cfg.levels < 1) throw std::invalid_argument("levels must be at least 1");
  if (cfg.mode != "raag" && cfg.mode != "special") throw std::invalid_argument("unknown mode " + cfg.mode);
  std::optional<CubeComplexSpec> spec;
  DefiningGraph g;
  if (cfg.mode == "raag") {
    g = DefiningGraph::load(cfg.input);
  } else {
    spec = CubeComplexSpec::load(cfg.input);
    g = *spec->graph;
    auto iso = check_local_isometry(*spec, g, cfg.strict_cubes);
    if (!iso.ok) throw ParseError("not a local isometry into the Salvetti complex: " + iso.violation);
  }
  BallOptions bo;
  bo.element_cap = cfg.element_cap;
  if (cfg.time_limit_seconds) {
    bo.deadline = std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                      std::chrono::duration<double>(*cfg.time_limit_seconds));
  }
  if (cfg.use_cache) bo.cache_dir = cfg.out_dir / "cache";
  const int n = cfg.levels;
  Ball ball = build_ball(g, n, bo);
  auto tilings = build_tilings(ball, n - 1);
  RuleOptions ro{cfg.coalesce};
  auto rule = extract_rule(tilings, g, ro);

  auto audit = audit_predecessors(ball);
  auto descriptor = check_descriptor(ball, tilings);
  std::size_t multi_cover = 0;
  for (std::size_t id = 0; id < ball.size(); ++id)
    if (ball.cover_count(static_cast<ElemId>(id)) > 1) ++multi_cover;

  RunResult res;
  json report;
  json pred_examples = json::array();
  for (ElemId e : audit.examples) pred_examples.push_back(format_normal_form(g, ball.element(e)));
  report["ball"] = {{"level_sizes", ball.level_sizes()}, {"size", ball.size()}};
  report["descriptor"] = {{"tiles_checked", descriptor.tiles_checked},
                          {"mismatches", descriptor.mismatches},
                          {"examples", descriptor.examples}};

  if (spec) {
    auto lifts = lift_basepoints(*spec, ball, n);
    auto pruned = prune_history(ball, tilings, rule, lifts, ro);
    json emb = json::array();
    for (const auto& e : pruned.embedding)
      emb.push_back({{"pruned_type", e.pruned_type},
                     {"ambient_type", e.ambient_type},
                     {"children_embed", e.children_embed}});
    report["special"] = {{"lift_level_sizes", lifts.level_sizes},
                         {"lift_states", lifts.states},
                         {"star_convexity_violations", 0},
                         {"ambient_rule", rule_json(rule, g)},
                         {"containment", {{"embeds", pruned.embeds}, {"types", emb}}}};
    res.tilings = std::move(pruned.tilings);
    res.rule = std::move(pruned.rule);
  } else {
    res.tilings = std::move(tilings);
    res.rule = std::move(rule);
  }
  res.unstable = !res.rule.stable;

  report["rule"] = rule_json(res.rule, g);
  report["growth"] = growth_json(res.tilings, res.rule);
  report["ends"] = ends_json(res.tilings, cfg.ends_window);
  report["mesh"] = mesh_json(res.tilings, res.rule);
  report["divergence"] = divergence_json(res.tilings);
  report["cone_types"] = cone_json(res.tilings, cfg.cone_depth);
  report["meta"] = {
      {"version", kVersion},
      {"graph", json::parse(g.to_json_text())},
      {"graph_hash", g.hash_hex()},
      {"mode", cfg.mode},
      {"levels", n},
      {"coalesce", cfg.coalesce},
      {"ends_window", cfg.ends_window},
      {"cone_depth", cfg.cone_depth},
      {"strict_cubes", cfg.strict_cubes},
      {"layout_seed", cfg.layout_seed},
      {"tiling_levels", "level n tiles sit over sphere n+1"},
      {"discrepancies",
       {{"predecessor_mismatches", audit.mismatches},
        {"predecessor_examples", pred_examples},
        {"descriptor_mismatches", descriptor.mismatches},
        {"refinement_unstable", res.unstable},
        {"multi_cover", multi_cover}}}};
  res.report = std::move(report);
  return res;
}

int run(const RunConfig& cfg, std::ostream& log) {
  try {
    auto res = compute(cfg);
    const auto& g_json = res.report["meta"]["graph"];
    DefiningGraph g = DefiningGraph::from_json_text(g_json.dump());
    const auto& ex = cfg.exports;
    if (ex.count("reports")) {
      write_atomic(cfg.out_dir / "report.json", res.report.dump(2) + "\n");
      write_atomic(cfg.out_dir / "counts.csv", counts_csv(res.tilings, res.rule));
    }
    if (ex.count("tilings")) {
      write_atomic(cfg.out_dir / "tilings.json", tilings_to_json(res.tilings, g).dump() + "\n");
    }
    if (ex.count("dot")) write_atomic(cfg.out_dir / "history.dot", history_dot(res.tilings));
    if (ex.count("svg")) {
      for (std::size_t l = 0; l < res.tilings.size(); ++l) {
        SvgOptions so;
        so.seed = cfg.layout_seed;
        write_atomic(cfg.out_dir / ("tiling-level-" + std::to_string(l) + ".svg"),
                     tiling_svg(res.tilings[l], so));
      }
    }
    const auto& r = res.report;
    log << "growth " << r["growth"]["totals"].dump() << " " << r["growth"]["classification"].get<std::string>()
        << "\nends " << r["ends"]["verdict"].get<std::string>()
        << "\nmesh " << r["mesh"]["status"].get<std::string>()
        << "\ndivergence " << r["divergence"]["fit"].get<std::string>()
        << "\ntypes " << r["rule"]["nonideal_types"].get<std::size_t>() << "\n";
    if (res.unstable) log << "warning: refinement did not stabilize within the observed levels\n";
    return kExitOk;
  } catch (const ParseError& e) {
    log << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const CapExceeded& e) {
    log << "error: " << e.what() << "\n";
    return kExitCap;
  } catch (const StarConvexityError& e) {
    log << "error: " << e.what() << "\n";
    return kExitStarConvexity;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace subdivlab
