#include "subdivlab/special.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace subdivlab {

namespace {

using nlohmann::json;

Letter parse_germ(const DefiningGraph& g, const std::string& s) {
  if (s.size() < 2 || (s.back() != '+' && s.back() != '-')) {
    throw ParseError("germ \"" + s + "\" must be a generator name followed by + or -");
  }
  auto gen = g.index_of(s.substr(0, s.size() - 1));
  if (!gen) throw ParseError("unknown generator in germ \"" + s + "\"");
  return {*gen, s.back() == '+' ? 1 : -1};
}

std::string format_germ(const DefiningGraph& g, Letter l) {
  return g.name(l.gen) + (l.sign > 0 ? "+" : "-");
}

int vertex_ref(const json& v, const std::vector<std::string>& names) {
  if (v.is_number_integer()) {
    int i = v.get<int>();
    if (i < 0 || i >= static_cast<int>(names.size())) throw ParseError("vertex index out of range");
    return i;
  }
  if (v.is_string()) {
    auto it = std::find(names.begin(), names.end(), v.get<std::string>());
    if (it == names.end()) throw ParseError("unknown vertex \"" + v.get<std::string>() + "\"");
    return static_cast<int>(it - names.begin());
  }
  throw ParseError("vertex references must be names or indices");
}

// A germ is an edge end seen from a vertex: the letter read when leaving it.
struct Germ {
  int vertex;
  Letter letter;
};

std::vector<Germ> germs_of(const CubeComplexSpec::Edge& e) {
  return {{e.from, {e.gen, e.sign}}, {e.to, {e.gen, -e.sign}}};
}

// Corners of a square: (vertex, two germ letters). Empty when the four edges
// cannot be traversed as x y x^-1 y^-1 with x, y on distinct generators.
std::vector<std::pair<int, std::pair<Letter, Letter>>> square_corners(
    const CubeComplexSpec& spec, const std::array<int, 4>& sq) {
  for (int mask = 0; mask < 16; ++mask) {
    int start[4], end[4];
    Letter step[4];
    for (int i = 0; i < 4; ++i) {
      const auto& e = spec.edges[sq[i]];
      bool fwd = !((mask >> i) & 1);
      start[i] = fwd ? e.from : e.to;
      end[i] = fwd ? e.to : e.from;
      step[i] = {e.gen, fwd ? e.sign : -e.sign};
    }
    bool closed = true;
    for (int i = 0; i < 4; ++i) closed = closed && end[i] == start[(i + 1) % 4];
    if (!closed) continue;
    if (step[0].gen == step[1].gen || step[2] != step[0].inverse() || step[3] != step[1].inverse()) {
      continue;
    }
    std::vector<std::pair<int, std::pair<Letter, Letter>>> out;
    for (int i = 0; i < 4; ++i) {
      Letter x = step[i].inverse(), y = step[(i + 1) % 4];
      out.push_back({end[i], {std::min(x, y), std::max(x, y)}});
    }
    return out;
  }
  return {};
}

}  // namespace

CubeComplexSpec CubeComplexSpec::from_json_text(std::string_view text, const DefiningGraph* g) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ParseError("cube complex must be a JSON object");
  CubeComplexSpec spec;
  if (j.contains("graph")) spec.graph = DefiningGraph::from_json_text(j["graph"].dump());
  if (!g) {
    if (!spec.graph) throw ParseError("cube complex has no \"graph\" and none was supplied");
    g = &*spec.graph;
  }
  if (!j.contains("vertices") || !j["vertices"].is_array() || j["vertices"].empty()) {
    throw ParseError("cube complex needs a nonempty \"vertices\" array");
  }
  for (const auto& v : j["vertices"]) {
    if (v.is_string()) {
      spec.vertices.push_back(v.get<std::string>());
    } else if (v.is_number_integer()) {
      spec.vertices.push_back(std::to_string(v.get<long long>()));
    } else {
      throw ParseError("vertex names must be strings or integers");
    }
  }
  if (!j.contains("edges") || !j["edges"].is_array()) throw ParseError("cube complex needs \"edges\"");
  for (const auto& e : j["edges"]) {
    if (!e.is_object() || !e.contains("from") || !e.contains("to") || !e.contains("label")) {
      throw ParseError("each edge needs \"from\", \"to\" and \"label\"");
    }
    Edge edge;
    edge.from = vertex_ref(e["from"], spec.vertices);
    edge.to = vertex_ref(e["to"], spec.vertices);
    if (!e["label"].is_string()) throw ParseError("edge labels must be generator names");
    auto gen = g->index_of(e["label"].get<std::string>());
    if (!gen) throw ParseError("unknown edge label \"" + e["label"].get<std::string>() + "\"");
    edge.gen = *gen;
    if (e.contains("sign")) {
      const auto& s = e["sign"];
      if (s.is_number_integer() && (s.get<int>() == 1 || s.get<int>() == -1)) {
        edge.sign = s.get<int>();
      } else if (s.is_string() && (s == "+" || s == "-")) {
        edge.sign = s == "+" ? 1 : -1;
      } else {
        throw ParseError("edge sign must be 1, -1, \"+\" or \"-\"");
      }
    }
    spec.edges.push_back(edge);
  }
  if (j.contains("squares")) {
    for (const auto& s : j["squares"]) {
      if (!s.is_array() || s.size() != 4) throw ParseError("each square lists four edge ids");
      std::array<int, 4> sq{};
      for (int i = 0; i < 4; ++i) {
        if (!s[i].is_number_integer()) throw ParseError("square entries must be edge ids");
        sq[i] = s[i].get<int>();
        if (sq[i] < 0 || sq[i] >= static_cast<int>(spec.edges.size())) {
          throw ParseError("square edge id out of range");
        }
      }
      spec.squares.push_back(sq);
    }
  }
  if (j.contains("cubes")) {
    for (const auto& c : j["cubes"]) {
      if (!c.is_object() || !c.contains("vertex") || !c.contains("germs") ||
          !c["germs"].is_array() || c["germs"].size() != 3) {
        throw ParseError("each cube needs a \"vertex\" and three \"germs\"");
      }
      CubeCorner corner;
      corner.vertex = vertex_ref(c["vertex"], spec.vertices);
      for (int i = 0; i < 3; ++i) {
        if (!c["germs"][i].is_string()) throw ParseError("germs must be strings like \"a+\"");
        corner.germs[i] = parse_germ(*g, c["germs"][i].get<std::string>());
      }
      std::sort(corner.germs.begin(), corner.germs.end());
      spec.cubes.push_back(corner);
    }
  }
  return spec;
}

CubeComplexSpec CubeComplexSpec::load(const std::filesystem::path& path, const DefiningGraph* g) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str(), g);
}

std::string CubeComplexSpec::to_json_text(const DefiningGraph& g) const {
  json j;
  j["vertices"] = vertices;
  j["edges"] = json::array();
  for (const auto& e : edges) {
    j["edges"].push_back({{"from", vertices[e.from]},
                          {"to", vertices[e.to]},
                          {"label", g.name(e.gen)},
                          {"sign", e.sign}});
  }
  j["squares"] = squares;
  if (!cubes.empty()) {
    j["cubes"] = json::array();
    for (const auto& c : cubes) {
      json germs = json::array();
      for (const auto& l : c.germs) germs.push_back(format_germ(g, l));
      j["cubes"].push_back({{"vertex", vertices[c.vertex]}, {"germs", germs}});
    }
  }
  j["graph"] = json::parse(g.to_json_text());
  return j.dump(2);
}

CubeComplexSpec salvetti_spec(const DefiningGraph& g) {
  CubeComplexSpec spec;
  spec.vertices = {"v"};
  for (int i = 0; i < g.size(); ++i) spec.edges.push_back({0, 0, i, 1});
  for (auto [a, b] : g.edges()) spec.squares.push_back({a, b, a, b});
  for (GenMask c : enumerate_cliques(g)) {
    if (std::popcount(c) != 3) continue;
    std::vector<int> gens;
    for (GenMask m = c; m; m &= m - 1) gens.push_back(std::countr_zero(m));
    for (int signs = 0; signs < 8; ++signs) {
      CubeComplexSpec::CubeCorner corner;
      for (int i = 0; i < 3; ++i) corner.germs[i] = {gens[i], (signs >> i) & 1 ? -1 : 1};
      std::sort(corner.germs.begin(), corner.germs.end());
      spec.cubes.push_back(corner);
    }
  }
  spec.graph = g;
  return spec;
}

IsometryCheck check_local_isometry(const CubeComplexSpec& spec, const DefiningGraph& g,
                                   bool strict) {
  auto fail = [](std::string why) { return IsometryCheck{false, std::move(why)}; };
  const int nv = static_cast<int>(spec.vertices.size());
  std::vector<std::vector<Letter>> germs(nv);
  for (std::size_t i = 0; i < spec.edges.size(); ++i) {
    const auto& e = spec.edges[i];
    if (e.gen < 0 || e.gen >= g.size()) return fail("edge " + std::to_string(i) + " has an invalid label");
    for (const auto& germ : germs_of(e)) {
      auto& at = germs[germ.vertex];
      if (std::find(at.begin(), at.end(), germ.letter) != at.end()) {
        return fail("injectivity: two edges at vertex " + spec.vertices[germ.vertex] +
                    " both read " + format_germ(g, germ.letter));
      }
      at.push_back(germ.letter);
    }
  }
  std::set<std::pair<int, std::pair<Letter, Letter>>> corners;
  for (std::size_t s = 0; s < spec.squares.size(); ++s) {
    auto cs = square_corners(spec, spec.squares[s]);
    if (cs.empty()) return fail("square " + std::to_string(s) + " is not a commutator 4-cycle");
    const auto& [v, pair] = cs.front();
    if (!g.adjacent(pair.first.gen, pair.second.gen)) {
      return fail("square " + std::to_string(s) + " has non-commuting labels " +
                  g.name(pair.first.gen) + ", " + g.name(pair.second.gen));
    }
    corners.insert(cs.begin(), cs.end());
  }
  for (int v = 0; v < nv; ++v) {
    auto& at = germs[v];
    std::sort(at.begin(), at.end());
    for (std::size_t i = 0; i < at.size(); ++i) {
      for (std::size_t j = i + 1; j < at.size(); ++j) {
        if (!g.adjacent(at[i].gen, at[j].gen)) continue;
        if (!corners.count({v, {at[i], at[j]}})) {
          return fail("fullness: germs " + format_germ(g, at[i]) + " and " + format_germ(g, at[j]) +
                      " at vertex " + spec.vertices[v] + " span no square");
        }
      }
    }
  }
  if (!strict) return {};
  std::set<std::pair<int, std::array<Letter, 3>>> cubes;
  for (const auto& c : spec.cubes) cubes.insert({c.vertex, c.germs});
  for (int v = 0; v < nv; ++v) {
    const auto& at = germs[v];
    auto spans = [&](Letter x, Letter y) {
      return corners.count({v, {std::min(x, y), std::max(x, y)}}) > 0;
    };
    for (std::size_t i = 0; i < at.size(); ++i)
      for (std::size_t j = i + 1; j < at.size(); ++j)
        for (std::size_t k = j + 1; k < at.size(); ++k) {
          if (!spans(at[i], at[j]) || !spans(at[i], at[k]) || !spans(at[j], at[k])) continue;
          if (!cubes.count({v, {at[i], at[j], at[k]}})) {
            return fail("cube fullness: germs " + format_germ(g, at[i]) + ", " +
                        format_germ(g, at[j]) + ", " + format_germ(g, at[k]) + " at vertex " +
                        spec.vertices[v] + " span no cube");
          }
        }
  }
  return {};
}

LiftSet lift_basepoints(const CubeComplexSpec& spec, const Ball& ball, int levels,
                        std::size_t state_cap) {
  if (levels > ball.depth()) throw std::invalid_argument("ball shallower than the lift depth");
  if (spec.vertices.empty()) throw std::invalid_argument("cube complex has no vertices");
  const int nv = static_cast<int>(spec.vertices.size());
  std::vector<std::vector<std::pair<Letter, int>>> out(nv);
  for (const auto& e : spec.edges) {
    out[e.from].push_back({{e.gen, e.sign}, e.to});
    out[e.to].push_back({{e.gen, -e.sign}, e.from});
  }
  std::vector<SignedSet> step(2 * ball.graph().size());
  for (int i = 0; i < ball.graph().size(); ++i) {
    step[2 * i] = {GenMask{1} << i, 0};
    step[2 * i + 1] = {0, GenMask{1} << i};
  }
  auto step_of = [&](Letter l) { return step[2 * l.gen + (l.sign > 0 ? 0 : 1)]; };

  LiftSet lifts;
  lifts.lifted.assign(ball.size(), 0);
  lifts.witness_vertex.assign(ball.size(), -1);
  std::vector<char> seen(ball.size() * static_cast<std::size_t>(nv), 0);
  const ElemId root = ball.level_elements(0).front();
  std::deque<std::pair<int, ElemId>> queue{{0, root}};
  seen[static_cast<std::size_t>(root) * nv] = 1;
  while (!queue.empty()) {
    auto [v, h] = queue.front();
    queue.pop_front();
    if (++lifts.states > state_cap) throw CapExceeded("lift state cap exceeded");
    if (!lifts.lifted[h]) {
      lifts.lifted[h] = 1;
      lifts.witness_vertex[h] = v;
    }
    for (const auto& [letter, w] : out[v]) {
      ElemId next = ball.neighbor(h, step_of(letter));
      if (!ball.in_ball(next, levels)) continue;
      auto& mark = seen[static_cast<std::size_t>(next) * nv + w];
      if (mark) continue;
      mark = 1;
      queue.push_back({w, next});
    }
  }
  lifts.level_sizes.assign(levels + 1, 0);
  for (std::size_t id = 0; id < ball.size(); ++id)
    if (lifts.lifted[id]) ++lifts.level_sizes[ball.level(static_cast<ElemId>(id))];
  return lifts;
}

std::vector<ElemId> star_convexity_violations(const LiftSet& lifts, const Ball& ball) {
  std::vector<ElemId> bad;
  for (std::size_t id = 0; id < lifts.lifted.size(); ++id) {
    ElemId h = static_cast<ElemId>(id);
    if (!lifts.lifted[id] || ball.level(h) == 0) continue;
    if (!lifts.contains(ball.predecessor(h))) bad.push_back(h);
  }
  return bad;
}

PrunedHistory prune_history(const Ball& ball, const std::vector<Tiling>& ambient,
                            const SubdivisionRule& ambient_rule, const LiftSet& lifts,
                            const RuleOptions& opts) {
  if (auto bad = star_convexity_violations(lifts, ball); !bad.empty()) {
    const auto& g = ball.graph();
    ElemId h = bad.front();
    throw StarConvexityError("star convexity fails: " + format_normal_form(g, ball.element(h)) +
                                 " is lifted but its predecessor " +
                                 format_normal_form(g, ball.element(ball.predecessor(h))) + " is not",
                             h);
  }
  PrunedHistory out;
  std::vector<int> prev_map;  // ambient index -> pruned index, previous level
  for (std::size_t l = 0; l < ambient.size(); ++l) {
    const Tiling& a = ambient[l];
    std::vector<int> map(a.tiles.size(), -1);
    Tiling t;
    t.level = static_cast<int>(l);
    std::vector<int> src;
    std::vector<Tile> nonideal, persisted, fresh;
    std::vector<int> src_nonideal, src_persisted, src_fresh;
    std::vector<int> idx_nonideal, idx_persisted, idx_fresh;
    const Tiling* prev = l ? &out.tilings.back() : nullptr;

    for (std::size_t i = 0; i < a.tiles.size(); ++i) {
      const Tile& at = a.tiles[i];
      bool is_copy = at.ideal && l > 0 && at.parent >= 0 && ambient[l - 1].tiles[at.parent].ideal &&
                     ambient[l - 1].tiles[at.parent].owner == at.owner &&
                     ambient[l - 1].tiles[at.parent].cells == at.cells;
      Tile tile = at;
      tile.children.clear();
      tile.type = -1;
      if (l > 0) {
        int p = at.parent >= 0 ? prev_map[at.parent] : -1;
        if (p < 0) continue;
        if (!is_copy && prev->tiles[p].ideal) continue;  // below an ideal tile
        tile.parent = p;
      }
      if (!at.ideal && !lifts.contains(at.owner)) tile.ideal = true;
      if (is_copy) {
        persisted.push_back(std::move(tile));
        src_persisted.push_back(static_cast<int>(i));
      } else if (tile.ideal) {
        fresh.push_back(std::move(tile));
        src_fresh.push_back(static_cast<int>(i));
      } else {
        nonideal.push_back(std::move(tile));
        src_nonideal.push_back(static_cast<int>(i));
      }
    }
    // Copies of tiles that became ideal by pruning.
    if (prev) {
      for (std::size_t p = 0; p < prev->tiles.size(); ++p) {
        const Tile& pt = prev->tiles[p];
        int s = out.source[l - 1][p];
        bool ambient_ideal = s >= 0 && ambient[l - 1].tiles[s].ideal;
        if (!pt.ideal || ambient_ideal) continue;
        Tile copy = pt;
        copy.level = static_cast<int>(l);
        copy.parent = static_cast<int>(p);
        copy.children.clear();
        copy.type = -1;
        persisted.push_back(std::move(copy));
        src_persisted.push_back(-1);
      }
    }
    auto append = [&](std::vector<Tile>& tiles, const std::vector<int>& sources, bool is_child) {
      for (std::size_t k = 0; k < tiles.size(); ++k) {
        int idx = static_cast<int>(t.tiles.size());
        if (sources[k] >= 0) map[sources[k]] = idx;
        if (is_child && prev) out.tilings.back().tiles[tiles[k].parent].children.push_back(idx);
        src.push_back(sources[k]);
        t.tiles.push_back(std::move(tiles[k]));
      }
    };
    append(nonideal, src_nonideal, true);
    append(persisted, src_persisted, false);
    append(fresh, src_fresh, true);
    for (const auto& e : a.edges) {
      int x = map[e.a], y = map[e.b];
      if (x < 0 || y < 0 || t.tiles[x].ideal || t.tiles[y].ideal) continue;
      auto [lo, hi] = std::minmax(x, y);
      t.edges.push_back({lo, hi, e.kind});
    }
    std::sort(t.edges.begin(), t.edges.end(), [](const TileEdge& x, const TileEdge& y) {
      return std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    out.source.push_back(std::move(src));
    out.tilings.push_back(std::move(t));
    prev_map = std::move(map);
  }
  out.rule = extract_rule(out.tilings, ball.graph(), opts);

  // Containment: every pruned non-ideal type sits inside one ambient type.
  const int levels = std::min(out.rule.typed_levels, ambient_rule.typed_levels);
  std::vector<std::set<int>> seen(out.rule.types.size());
  for (int l = 0; l <= levels; ++l) {
    for (std::size_t i = 0; i < out.tilings[l].tiles.size(); ++i) {
      const Tile& t = out.tilings[l].tiles[i];
      int s = out.source[l][i];
      if (t.ideal || s < 0) continue;
      seen[t.type].insert(ambient[l].tiles[s].type);
    }
  }
  std::vector<int> to_ambient(out.rule.types.size(), -1);
  for (const auto& tt : out.rule.types)
    if (!tt.ideal && seen[tt.id].size() == 1) to_ambient[tt.id] = *seen[tt.id].begin();
  out.embeds = true;
  for (const auto& tt : out.rule.types) {
    if (tt.ideal) continue;
    TypeEmbedding emb{tt.id, to_ambient[tt.id], false};
    if (emb.ambient_type >= 0) {
      std::map<int, int> need;
      bool mapped = true;
      for (auto [child, mult] : tt.children) {
        if (out.rule.types[child].ideal) continue;
        if (to_ambient[child] < 0) mapped = false;
        need[to_ambient[child]] += mult;
      }
      const auto& have = ambient_rule.types[emb.ambient_type].children;
      emb.children_embed = mapped;
      for (auto [type, mult] : need) {
        auto it = have.find(type);
        if (it == have.end() || it->second < mult) emb.children_embed = false;
      }
    }
    out.embeds = out.embeds && emb.ambient_type >= 0 && emb.children_embed;
    out.embedding.push_back(emb);
  }
  return out;
}

ConeTypeReport cone_types(const HistoryGraph& h, int depth) {
  if (depth < 0) throw std::invalid_argument("cone depth must be non-negative");
  const int nv = static_cast<int>(h.vertices.size());
  int top = -1;
  for (const auto& v : h.vertices) top = std::max(top, v.level);
  if (top - depth < 0) {
    throw std::invalid_argument("insufficient depth: cone depth " + std::to_string(depth) +
                                " needs " + std::to_string(depth + 1) + " levels");
  }
  // Vertex nv is the virtual root above level 0.
  std::vector<std::vector<int>> children(nv + 1);
  std::vector<int> degree(nv + 1, 0);
  for (auto [p, c] : h.vertical) children[p].push_back(c);
  for (int v = 0; v < nv; ++v)
    if (h.vertices[v].level == 0) children[nv].push_back(v);
  for (auto [a, b] : h.horizontal) {
    ++degree[a];
    ++degree[b];
  }
  std::vector<int> sig(degree);
  for (int j = 1; j <= depth; ++j) {
    std::map<std::vector<int>, int> table;
    std::vector<int> next(nv + 1);
    for (int v = 0; v <= nv; ++v) {
      std::vector<int> key{degree[v]};
      for (int c : children[v]) key.push_back(sig[c]);
      std::sort(key.begin() + 1, key.end());
      next[v] = table.emplace(std::move(key), static_cast<int>(table.size())).first->second;
    }
    sig = std::move(next);
  }
  ConeTypeReport r;
  r.depth = depth;
  std::set<int> all{sig[nv]};
  std::vector<std::set<int>> per(top - depth + 1);
  for (int v = 0; v < nv; ++v) {
    int l = h.vertices[v].level;
    if (l > top - depth) continue;
    per[l].insert(sig[v]);
    all.insert(sig[v]);
  }
  r.classes = all.size();
  r.per_level.push_back(1);
  for (const auto& s : per) r.per_level.push_back(s.size());
  return r;
}

}  // namespace subdivlab
