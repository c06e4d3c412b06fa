#include "subdivlab/tiling.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <stdexcept>
#include <unordered_map>

namespace subdivlab {

const char* to_string(EdgeKind k) {
  return k == EdgeKind::FlatRidge ? "flat-ridge" : "containment";
}

std::size_t Tiling::nonideal_count() const {
  return static_cast<std::size_t>(
      std::count_if(tiles.begin(), tiles.end(), [](const Tile& t) { return !t.ideal; }));
}

std::vector<std::vector<int>> Tiling::adjacency() const {
  std::vector<std::vector<int>> adj(tiles.size());
  for (const auto& e : edges) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

namespace {

// Tile of `owner` (within one level) whose cells touch `v`; falls back to the
// owner's first tile.
int tile_touching(const Tiling& t, const std::vector<int>& owner_tiles, const DefiningGraph& g,
                  const CubeCell& v) {
  for (int i : owner_tiles)
    for (const auto& c : t.tiles[i].cells)
      if (!cell_is_ideal(g, c) && cells_meet_truncated(g, c, v)) return i;
  return owner_tiles.front();
}

int tile_containing(const Tiling& t, const std::vector<int>& owner_tiles, const CubeCell& v) {
  for (int i : owner_tiles)
    if (std::binary_search(t.tiles[i].cells.begin(), t.tiles[i].cells.end(), v)) return i;
  return owner_tiles.front();
}

}  // namespace

std::vector<Tiling> build_tilings(const Ball& ball, int max_level) {
  if (max_level < 0) throw std::invalid_argument("tiling level must be non-negative");
  if (ball.depth() < max_level + 1) {
    throw std::invalid_argument("ball too shallow: level " + std::to_string(max_level) +
                                " needs depth " + std::to_string(max_level + 1));
  }
  const auto& g = ball.graph();
  std::vector<Tiling> out;
  std::unordered_map<ElemId, std::vector<int>> prev_by_owner;

  for (int n = 0; n <= max_level; ++n) {
    Tiling t;
    t.level = n;
    std::unordered_map<ElemId, std::vector<int>> by_owner;
    std::vector<Tile> fresh_ideal;
    for (ElemId e : ball.level_elements(n + 1)) {
      auto comps = visible_region(ball, n + 1, e);
      for (std::size_t c = 0; c < comps.size(); ++c) {
        Tile tile;
        tile.level = n;
        tile.owner = e;
        tile.component = static_cast<int>(c);
        tile.ideal = !comps[c].has_nonideal;
        tile.cells = std::move(comps[c].cells);
        tile.shape = std::move(comps[c].shape);
        if (tile.ideal) {
          fresh_ideal.push_back(std::move(tile));
          continue;
        }
        tile.covered = ball.moves()[ball.predecessor_move(e)];
        by_owner[e].push_back(static_cast<int>(t.tiles.size()));
        t.tiles.push_back(std::move(tile));
      }
    }
    if (n > 0) {
      Tiling& prev = out.back();
      for (std::size_t i = 0; i < prev.tiles.size(); ++i) {
        if (!prev.tiles[i].ideal) continue;
        Tile copy = prev.tiles[i];
        copy.level = n;
        copy.parent = static_cast<int>(i);
        copy.children.clear();
        copy.type = -1;
        t.tiles.push_back(std::move(copy));
      }
    }
    for (auto& tile : fresh_ideal) t.tiles.push_back(std::move(tile));

    // Parents: the tile over the predecessor that contains the covered cell.
    if (n > 0) {
      Tiling& prev = out.back();
      const std::size_t fresh_start = t.tiles.size() - fresh_ideal.size();
      for (std::size_t i = 0; i < t.tiles.size(); ++i) {
        Tile& tile = t.tiles[i];
        bool persisted = tile.ideal && i < fresh_start;
        if (persisted) continue;
        ElemId p = ball.predecessor(tile.owner);
        auto it = prev_by_owner.find(p);
        if (it == prev_by_owner.end()) continue;
        CubeCell via{ball.moves()[ball.predecessor_move(tile.owner)]};
        tile.parent = tile_containing(prev, it->second, via);
        prev.tiles[tile.parent].children.push_back(static_cast<int>(i));
      }
    }

    // Horizontal edges across flat ridges of the sphere.
    std::set<std::pair<int, int>> seen;
    for (ElemId e : ball.level_elements(n + 1)) {
      auto mine = by_owner.find(e);
      if (mine == by_owner.end()) continue;
      for (int m = 0; m < static_cast<int>(ball.moves().size()); ++m) {
        const SignedSet& v = ball.moves()[m];
        if (v.size() != 2) continue;
        ElemId other = kOutside;
        SignedSet shift;
        int inside = 0;
        for (const auto& s : nonempty_sub_signed_sets(v)) {
          ElemId h = ball.neighbor(e, s);
          if (!ball.in_ball(h, n + 1)) continue;
          ++inside;
          other = h;
          shift = s;
        }
        // e itself is the fourth member and always inside.
        if (inside != 1 || ball.level(other) != n + 1) continue;
        auto theirs = by_owner.find(other);
        if (theirs == by_owner.end()) continue;
        int a = tile_touching(t, mine->second, g, CubeCell{v});
        int b = tile_touching(t, theirs->second, g, CubeCell{v.flipped(shift.support())});
        if (a == b) continue;
        auto key = std::minmax(a, b);
        if (!seen.insert(key).second) continue;
        EdgeKind kind = t.tiles[a].covered.size() == t.tiles[b].covered.size()
                            ? EdgeKind::FlatRidge
                            : EdgeKind::Containment;
        t.edges.push_back({key.first, key.second, kind});
      }
    }
    std::sort(t.edges.begin(), t.edges.end(),
              [](const TileEdge& x, const TileEdge& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
    prev_by_owner = std::move(by_owner);
    out.push_back(std::move(t));
  }
  return out;
}

Tiling build_tiling(const Ball& ball, int n) { return build_tilings(ball, n).back(); }

HistoryGraph build_history(const std::vector<Tiling>& tilings) {
  HistoryGraph h;
  std::vector<std::vector<int>> vertex_of(tilings.size());
  for (std::size_t l = 0; l < tilings.size(); ++l) {
    h.level_offset.push_back(static_cast<int>(h.vertices.size()));
    vertex_of[l].assign(tilings[l].tiles.size(), -1);
    for (std::size_t i = 0; i < tilings[l].tiles.size(); ++i) {
      if (tilings[l].tiles[i].ideal) continue;
      vertex_of[l][i] = static_cast<int>(h.vertices.size());
      h.vertices.push_back({static_cast<int>(l), static_cast<int>(i)});
    }
  }
  for (std::size_t l = 0; l < tilings.size(); ++l) {
    for (const auto& e : tilings[l].edges) {
      int a = vertex_of[l][e.a], b = vertex_of[l][e.b];
      if (a >= 0 && b >= 0) h.horizontal.emplace_back(a, b);
    }
    if (l == 0) continue;
    for (std::size_t i = 0; i < tilings[l].tiles.size(); ++i) {
      const Tile& t = tilings[l].tiles[i];
      if (t.ideal || t.parent < 0) continue;
      h.vertical.emplace_back(vertex_of[l - 1][t.parent], vertex_of[l][i]);
    }
  }
  return h;
}

std::vector<int> SubdivisionRule::nonideal_types() const {
  std::vector<int> out;
  for (const auto& t : types)
    if (!t.ideal) out.push_back(t.id);
  return out;
}

std::vector<std::vector<long long>> SubdivisionRule::transition() const {
  auto ids = nonideal_types();
  std::vector<int> pos(types.size(), -1);
  for (std::size_t i = 0; i < ids.size(); ++i) pos[ids[i]] = static_cast<int>(i);
  std::vector<std::vector<long long>> c(ids.size(), std::vector<long long>(ids.size(), 0));
  for (std::size_t i = 0; i < ids.size(); ++i)
    for (auto [child, mult] : types[ids[i]].children)
      if (pos[child] >= 0) c[i][pos[child]] += mult;
  return c;
}

namespace {

GenMask permute_mask(GenMask m, const std::vector<int>& perm) {
  GenMask out = 0;
  for (; m; m &= m - 1) out |= GenMask{1} << perm[std::countr_zero(m)];
  return out;
}

using Signature = std::vector<int>;

int intern(std::map<Signature, int>& table, Signature sig) {
  auto [it, fresh] = table.emplace(std::move(sig), static_cast<int>(table.size()));
  return it->second;
}

std::size_t distinct(const std::vector<std::vector<int>>& labels, int upto) {
  std::set<int> s;
  for (int l = 0; l <= upto; ++l) s.insert(labels[l].begin(), labels[l].end());
  return s.size();
}

}  // namespace

SubdivisionRule extract_rule(std::vector<Tiling>& tilings, const DefiningGraph& g,
                             const RuleOptions& opts) {
  if (tilings.empty()) throw std::invalid_argument("extract_rule needs at least one level");
  const int top = static_cast<int>(tilings.size()) - 1;
  std::vector<std::vector<int>> autos;
  if (opts.coalesce) autos = g.automorphisms();
  std::unordered_map<GenMask, GenMask> class_memo;
  auto clique_class = [&](GenMask m) {
    auto it = class_memo.find(m);
    if (it != class_memo.end()) return it->second;
    GenMask best = m;
    for (const auto& p : autos) {
      GenMask q = permute_mask(m, p);
      if (clique_less(q, best)) best = q;
    }
    return class_memo[m] = best;
  };

  SubdivisionRule rule;
  std::map<Signature, int> table;
  std::set<Signature> raw;
  std::vector<std::vector<int>> cur(tilings.size());
  for (int l = 0; l <= top; ++l) {
    for (const auto& t : tilings[l].tiles) {
      Signature sig{t.ideal ? 1 : 0, static_cast<int>(t.ideal ? 0 : clique_class(t.clique()))};
      sig.insert(sig.end(), t.shape.begin(), t.shape.end());
      Signature raw_sig{t.ideal ? 1 : 0, static_cast<int>(t.clique())};
      raw_sig.insert(raw_sig.end(), t.shape.begin(), t.shape.end());
      raw.insert(raw_sig);
      cur[l].push_back(intern(table, std::move(sig)));
    }
  }
  {
    std::set<std::vector<int>> shapes;
    for (const auto& t : tilings[0].tiles)
      if (!t.ideal) shapes.insert(t.shape);
    rule.level0_shape_classes = shapes.size();
  }
  rule.raw_clique_classes = raw.size();

  int k = 0;
  for (;; ++k) {
    const int upto = top - k - 1;  // levels whose children are labelled
    if (upto < 0) {
      rule.stable = false;
      break;
    }
    std::map<Signature, int> next_table;
    std::vector<std::vector<int>> next(upto + 1);
    for (int l = 0; l <= upto; ++l) {
      const auto& level = tilings[l];
      const auto& below = tilings[l + 1];
      std::vector<int> slot(below.tiles.size(), -1);
      for (std::size_t i = 0; i < level.tiles.size(); ++i)
        for (int c : level.tiles[i].children) slot[c] = static_cast<int>(i);
      std::vector<std::vector<std::tuple<int, int, int>>> inner_of(level.tiles.size());
      for (const auto& e : below.edges) {
        if (slot[e.a] < 0 || slot[e.a] != slot[e.b]) continue;
        int x = cur[l + 1][e.a], y = cur[l + 1][e.b];
        inner_of[slot[e.a]].emplace_back(std::min(x, y), std::max(x, y), static_cast<int>(e.kind));
      }
      for (std::size_t i = 0; i < level.tiles.size(); ++i) {
        const Tile& t = level.tiles[i];
        Signature sig{cur[l][i]};
        std::vector<int> kids;
        for (int c : t.children) kids.push_back(cur[l + 1][c]);
        std::sort(kids.begin(), kids.end());
        sig.push_back(static_cast<int>(kids.size()));
        sig.insert(sig.end(), kids.begin(), kids.end());
        auto& inner = inner_of[i];
        std::sort(inner.begin(), inner.end());
        for (auto [x, y, kind] : inner) {
          sig.push_back(x);
          sig.push_back(y);
          sig.push_back(kind);
        }
        next[l].push_back(intern(next_table, std::move(sig)));
      }
    }
    if (distinct(next, upto) == distinct(cur, upto)) {
      rule.stable = true;
      break;
    }
    cur.resize(upto + 1);
    for (int l = 0; l <= upto; ++l) cur[l] = std::move(next[l]);
  }
  rule.rounds = k;
  rule.typed_levels = std::max(0, top - k);
  if (!rule.stable) rule.typed_levels = static_cast<int>(cur.size()) - 1;

  // Renumber labels in order of first appearance.
  std::map<int, int> type_of;
  for (int l = 0; l <= rule.typed_levels; ++l) {
    for (std::size_t i = 0; i < tilings[l].tiles.size(); ++i) {
      auto [it, fresh] = type_of.emplace(cur[l][i], static_cast<int>(type_of.size()));
      Tile& t = tilings[l].tiles[i];
      t.type = it->second;
      if (fresh) {
        TileType tt;
        tt.id = it->second;
        tt.ideal = t.ideal;
        tt.clique = t.ideal ? 0 : clique_class(t.clique());
        tt.shape = t.shape;
        rule.types.push_back(std::move(tt));
      }
    }
  }
  for (auto& tt : rule.types) tt.count_by_level.assign(rule.typed_levels + 1, 0);
  std::vector<char> described(rule.types.size(), 0);
  for (int l = 0; l <= rule.typed_levels; ++l) {
    const auto& level = tilings[l];
    for (std::size_t i = 0; i < level.tiles.size(); ++i) {
      const Tile& t = level.tiles[i];
      auto& tt = rule.types[t.type];
      ++tt.count_by_level[l];
      if (l == rule.typed_levels || tt.ideal || described[t.type]) continue;
      described[t.type] = 1;
      const auto& below = tilings[l + 1];
      std::set<int> kids(t.children.begin(), t.children.end());
      for (int c : t.children) {
        const Tile& child = below.tiles[c];
        ++tt.children[child.type];
        if (child.ideal) ++tt.ideal_children;
      }
      for (const auto& e : below.edges) {
        if (!kids.count(e.a) || !kids.count(e.b)) continue;
        auto [x, y] = std::minmax(below.tiles[e.a].type, below.tiles[e.b].type);
        ++tt.internal_edges[{x, y, static_cast<int>(e.kind)}];
      }
    }
  }

  // Replay from level 0: children by rule, ideal tiles carried forward.
  rule.replay_ok = true;
  std::vector<long long> counts(rule.types.size(), 0);
  for (const auto& tt : rule.types) counts[tt.id] = static_cast<long long>(tt.count_by_level[0]);
  for (int l = 1; l <= rule.typed_levels; ++l) {
    std::vector<long long> next(rule.types.size(), 0);
    for (const auto& tt : rule.types) {
      if (tt.ideal) {
        next[tt.id] += counts[tt.id];
        continue;
      }
      if (counts[tt.id] > 0 && !described[tt.id]) {
        rule.replay_ok = false;
        rule.replay_errors.push_back("type " + std::to_string(tt.id) +
                                     " has no observed children before level " +
                                     std::to_string(l));
      }
      for (auto [child, mult] : tt.children) next[child] += counts[tt.id] * mult;
    }
    for (const auto& tt : rule.types) {
      if (next[tt.id] != static_cast<long long>(tt.count_by_level[l])) {
        rule.replay_ok = false;
        rule.replay_errors.push_back("level " + std::to_string(l) + " type " +
                                     std::to_string(tt.id) + ": predicted " +
                                     std::to_string(next[tt.id]) + ", observed " +
                                     std::to_string(tt.count_by_level[l]));
      }
    }
    counts = std::move(next);
  }
  return rule;
}

InflationComplex inflation(const DefiningGraph& g) {
  InflationComplex ic;
  ic.facets = diagonal_elements(g);
  ic.nonideal_facets = ic.facets.size();
  for (const auto& f : ideal_facets(g)) ic.facets.push_back(f);
  std::map<SignedSet, int> index;
  for (std::size_t i = 0; i < ic.facets.size(); ++i) index[ic.facets[i]] = static_cast<int>(i);
  for (std::size_t i = 0; i < ic.facets.size(); ++i) {
    const SignedSet& big = ic.facets[i];
    for (const auto& s : nonempty_sub_signed_sets(big)) {
      if (s.size() + 1 != big.size()) continue;
      auto it = index.find(s);
      if (it != index.end()) ic.ridges.emplace_back(it->second, static_cast<int>(i));
    }
  }
  std::sort(ic.ridges.begin(), ic.ridges.end());
  return ic;
}

StarComplement star_complement(const DefiningGraph& g, const SignedSet& sigma) {
  if (sigma.empty() || !is_spherical(g, sigma)) {
    throw std::invalid_argument("star complement needs a nonempty spherical signed set");
  }
  const GenMask sup = sigma.support();
  // Same-sign overlap with sigma: the piece moves further away from the gluing side.
  auto agrees = [&](const SignedSet& s) { return (s.pos & sigma.pos) || (s.neg & sigma.neg); };
  auto opposed = [&](const SignedSet& s) { return (s.pos & sigma.neg) || (s.neg & sigma.pos); };
  StarComplement out;
  for (const auto& w : diagonal_elements(g)) {
    bool candidate = (w.support() & sup) ? !opposed(w) : !g.is_clique(sup | w.support());
    if (!candidate) continue;
    out.candidates.push_back(w);
    bool survives = true;
    for (const auto& s : nonempty_sub_signed_sets(w)) {
      if (!agrees(s) && g.is_clique(sup | s.support())) {
        survives = false;
        break;
      }
    }
    if (survives) out.surviving.push_back(w);
  }
  return out;
}

DescriptorCheck check_descriptor(const Ball& ball, const std::vector<Tiling>& tilings) {
  DescriptorCheck out;
  const auto& g = ball.graph();
  for (std::size_t l = 0; l + 1 < tilings.size(); ++l) {
    for (const auto& t : tilings[l].tiles) {
      if (t.ideal) continue;
      ++out.tiles_checked;
      std::vector<SignedSet> actual;
      for (int c : t.children) {
        const Tile& child = tilings[l + 1].tiles[c];
        if (!child.ideal) actual.push_back(child.covered);
      }
      std::sort(actual.begin(), actual.end());
      auto predicted = star_complement(g, t.covered).surviving;
      std::sort(predicted.begin(), predicted.end());
      if (actual == predicted) continue;
      ++out.mismatches;
      if (out.examples.size() < 8) {
        out.examples.push_back("level " + std::to_string(l) + " owner " +
                               format_normal_form(g, ball.element(t.owner)) + ": " +
                               std::to_string(actual.size()) + " children, " +
                               std::to_string(predicted.size()) + " predicted");
      }
    }
  }
  return out;
}

}  // namespace subdivlab
