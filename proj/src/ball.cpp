#include "subdivlab/ball.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace subdivlab {

namespace {

constexpr ElemId kPendingBase = -2;  // neighbours awaiting an id: kPendingBase - temp index

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) { parent[find(a)] = find(b); }
};

bool read_cached_level(const std::filesystem::path& path, const DefiningGraph& g,
                       std::vector<NormalForm>& out) {
  std::ifstream in(path);
  if (!in) return false;
  std::string line;
  if (!std::getline(in, line) || line.rfind("# subdivlab level cache", 0) != 0) return false;
  out.clear();
  while (std::getline(in, line)) {
    if (line == "1") {
      out.emplace_back();
      continue;
    }
    out.push_back(normalize(g, parse_word(g, line)));
  }
  return true;
}

void write_cached_level(const std::filesystem::path& path, const DefiningGraph& g, int level,
                        const std::vector<ElemId>& ids, const std::vector<NormalForm>& elems) {
  std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp);
    out << "# subdivlab level cache v1 " << g.hash_hex() << " level " << level << " count "
        << ids.size() << "\n";
    for (ElemId id : ids) {
      const auto& nf = elems[id];
      out << (nf.is_identity() ? std::string("1") : format_word(g, nf.flatten())) << "\n";
    }
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

std::filesystem::path level_cache_path(const std::filesystem::path& dir, const DefiningGraph& g,
                                       int level) {
  return dir / (g.hash_hex() + "-level-" + std::to_string(level) + ".txt");
}

std::optional<int> Ball::move_index(const SignedSet& s) const {
  auto it = move_index_.find(s.key());
  if (it == move_index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> Ball::level_sizes() const {
  std::vector<std::size_t> out;
  for (const auto& l : levels_) out.push_back(l.size());
  return out;
}

std::optional<ElemId> Ball::find(const NormalForm& nf) const {
  auto it = index_.find(nf.key());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int Ball::level_of(const NormalForm& nf) const {
  auto id = find(nf);
  return id ? level_of_[*id] : -1;
}

ElemId Ball::neighbor(ElemId g, const SignedSet& t) const {
  if (t.empty()) return g;
  auto m = move_index(t);
  if (!m) throw std::invalid_argument("not a diagonal move");
  return neighbor(g, *m);
}

void Ball::add_level(std::vector<NormalForm> level) {
  std::sort(level.begin(), level.end());
  std::vector<ElemId> ids;
  ids.reserve(level.size());
  int lvl = static_cast<int>(levels_.size());
  for (auto& nf : level) {
    ElemId id = static_cast<ElemId>(elems_.size());
    index_.emplace(nf.key(), id);
    elems_.push_back(std::move(nf));
    level_of_.push_back(lvl);
    ids.push_back(id);
  }
  levels_.push_back(std::move(ids));
  neighbors_.resize(elems_.size() * moves_.size(), kOutside);
}

void Ball::fill_neighbors(ElemId from, ElemId to) {
  for (ElemId id = from; id < to; ++id) {
    for (std::size_t m = 0; m < moves_.size(); ++m) {
      auto it = index_.find(translate(graph_, elems_[id], moves_[m]).key());
      neighbors_[id * moves_.size() + m] = it == index_.end() ? kOutside : it->second;
    }
  }
}

void Ball::assign_predecessors(int from_level) {
  const std::size_t nm = moves_.size();
  std::vector<int> inv(nm);
  std::vector<std::vector<int>> proper_subs(nm);
  for (std::size_t m = 0; m < nm; ++m) {
    inv[m] = *move_index(moves_[m].inverse());
    for (const auto& s : nonempty_sub_signed_sets(moves_[m]))
      if (s != moves_[m]) proper_subs[m].push_back(*move_index(s));
  }
  pred_.resize(elems_.size(), kOutside);
  pred_move_.resize(elems_.size(), -1);
  cover_count_.resize(elems_.size(), 0);
  for (int n = std::max(1, from_level); n <= depth(); ++n) {
    for (ElemId g : levels_[n]) {
      ElemId best_convex = kOutside, best_any = kOutside;
      int move_convex = -1, move_any = -1, covers = 0;
      for (std::size_t m = 0; m < nm; ++m) {
        ElemId p = neighbor(g, inv[m]);
        if (p == kOutside || level_of_[p] != n - 1) continue;
        if (best_any == kOutside || p < best_any) {
          best_any = p;
          move_any = static_cast<int>(m);
        }
        bool convex = std::all_of(proper_subs[m].begin(), proper_subs[m].end(), [&](int s) {
          ElemId q = neighbor(p, s);
          return q == kOutside || level_of_[q] > n - 1;
        });
        if (!convex) continue;
        ++covers;
        if (best_convex == kOutside || p < best_convex) {
          best_convex = p;
          move_convex = static_cast<int>(m);
        }
      }
      pred_[g] = best_convex != kOutside ? best_convex : best_any;
      pred_move_[g] = best_convex != kOutside ? move_convex : move_any;
      cover_count_[g] = covers;
    }
  }
}

Ball build_ball(const DefiningGraph& g, int levels, const BallOptions& opts) {
  if (levels < 0) throw std::invalid_argument("level count must be non-negative");
  Ball ball;
  ball.graph_ = g;
  ball.moves_ = diagonal_elements(g);
  for (std::size_t m = 0; m < ball.moves_.size(); ++m)
    ball.move_index_.emplace(ball.moves_[m].key(), static_cast<int>(m));
  const std::size_t nm = ball.moves_.size();

  auto check_limits = [&](std::size_t pending) {
    if (ball.elems_.size() + pending > opts.element_cap) {
      throw CapExceeded("element cap of " + std::to_string(opts.element_cap) + " exceeded");
    }
    if (opts.deadline && std::chrono::steady_clock::now() > *opts.deadline) {
      throw CapExceeded("time limit exceeded");
    }
  };

  // Levels served from the cache; their neighbour tables are filled afterwards.
  int loaded = 0;
  if (!opts.cache_dir.empty()) {
    std::vector<NormalForm> lvl;
    while (loaded <= levels &&
           read_cached_level(level_cache_path(opts.cache_dir, g, loaded), g, lvl)) {
      check_limits(lvl.size());
      ball.add_level(std::move(lvl));
      ++loaded;
    }
  }
  if (loaded == 0) {
    ball.add_level({NormalForm{}});
    if (!opts.cache_dir.empty()) {
      write_cached_level(level_cache_path(opts.cache_dir, g, 0), g, 0, ball.levels_[0],
                         ball.elems_);
    }
    loaded = 1;
  }
  ElemId filled_upto = 0;  // elements below this id have neighbour tables
  if (loaded - 1 < levels) {
    filled_upto = ball.levels_[loaded - 1].front();
    ball.fill_neighbors(0, filled_upto);
  }

  for (int n = loaded - 1; n < levels; ++n) {
    std::unordered_map<std::vector<std::int32_t>, int, KeyHash> pending;
    std::vector<NormalForm> next;
    for (ElemId gid : ball.levels_[n]) {
      for (std::size_t m = 0; m < nm; ++m) {
        NormalForm h = translate(g, ball.elems_[gid], ball.moves_[m]);
        ElemId& slot = ball.neighbors_[gid * nm + m];
        if (auto it = ball.index_.find(h.key()); it != ball.index_.end()) {
          slot = it->second;
          continue;
        }
        auto [it, fresh] = pending.emplace(h.key(), static_cast<int>(next.size()));
        if (fresh) next.push_back(std::move(h));
        slot = kPendingBase - it->second;
      }
      if ((gid & 1023) == 0) check_limits(next.size());
    }
    check_limits(next.size());
    std::vector<NormalForm> copy = next;
    ball.add_level(std::move(next));
    for (ElemId gid : ball.levels_[n]) {
      for (std::size_t m = 0; m < nm; ++m) {
        ElemId& slot = ball.neighbors_[gid * nm + m];
        if (slot <= kPendingBase) {
          slot = *ball.find(copy[kPendingBase - slot]);
        }
      }
    }
    if (!opts.cache_dir.empty()) {
      write_cached_level(level_cache_path(opts.cache_dir, g, n + 1), g, n + 1,
                         ball.levels_[n + 1], ball.elems_);
    }
    filled_upto = ball.levels_[n + 1].front();
  }
  // The deepest level (or a fully cached ball) only needs lookups.
  ball.fill_neighbors(filled_upto, static_cast<ElemId>(ball.size()));
  ball.assign_predecessors(1);
  return ball;
}

std::vector<ElemId> domain_set(const Ball& ball, const BoundaryCell& c) {
  const auto& g = ball.graph();
  std::vector<ElemId> out{c.owner};
  for (const auto& s : nonempty_sub_signed_sets(c.cell.v)) {
    if (!g.is_clique(s.support())) continue;
    out.push_back(ball.neighbor(c.owner, s));
  }
  return out;
}

BoundaryCell canonical(const Ball& ball, const BoundaryCell& c) {
  const auto& g = ball.graph();
  BoundaryCell best = c;
  for (const auto& s : nonempty_sub_signed_sets(c.cell.v)) {
    if (!g.is_clique(s.support())) continue;
    ElemId h = ball.neighbor(c.owner, s);
    if (h == kOutside) continue;
    BoundaryCell cand{h, CubeCell{c.cell.v.flipped(s.support())}};
    if (cand.owner < best.owner || (cand.owner == best.owner && cand.cell < best.cell)) {
      best = cand;
    }
  }
  return best;
}

const char* to_string(CellClass c) {
  switch (c) {
    case CellClass::Interior: return "interior";
    case CellClass::Convex: return "convex";
    case CellClass::Flat: return "flat";
    case CellClass::Concave: return "concave";
    case CellClass::Covered: return "covered";
    case CellClass::Ideal: return "ideal";
  }
  return "?";
}

CellClassification classify_cell(const Ball& ball, int n, const BoundaryCell& c) {
  if (n > ball.depth()) throw std::invalid_argument("level beyond the built ball");
  if (c.cell.v.empty()) throw std::invalid_argument("cell support must be nonempty");
  int count = 0;
  for (ElemId m : domain_set(ball, c))
    if (ball.in_ball(m, n)) ++count;
  if (cell_is_ideal(ball.graph(), c.cell)) return {CellClass::Ideal, count};
  const int total = 1 << c.cell.codim();
  CellClass kind = CellClass::Interior;
  if (count == 1) {
    kind = CellClass::Convex;
  } else if (count == total) {
    kind = CellClass::Covered;
  } else if (count == 2) {
    kind = CellClass::Flat;
  } else if (count == total - 1) {
    kind = CellClass::Concave;
  }
  return {kind, count};
}

namespace {

bool convex_at(const Ball& ball, int n, ElemId g, const SignedSet& v) {
  for (const auto& s : nonempty_sub_signed_sets(v))
    if (ball.in_ball(ball.neighbor(g, s), n)) return false;
  return true;
}

}  // namespace

std::vector<BoundaryCell> convex_cells(const Ball& ball, int n) {
  if (n < 0 || n >= ball.depth()) {
    throw std::invalid_argument("convex_cells needs 0 <= n < ball depth");
  }
  std::vector<BoundaryCell> out;
  for (ElemId g : ball.level_elements(n))
    for (const auto& v : ball.moves())
      if (convex_at(ball, n, g, v)) out.push_back({g, CubeCell{v}});
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<RegionComponent> visible_region(const Ball& ball, int n, ElemId g) {
  if (ball.level(g) != n) throw std::invalid_argument("visible_region needs level(g) == n");
  const auto& graph = ball.graph();
  std::vector<CubeCell> cells;
  for (const auto& v : ball.moves())
    if (convex_at(ball, n, g, v)) cells.push_back({v});
  for (const auto& f : ideal_facets(graph)) cells.push_back({f});
  UnionFind uf(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i)
    for (std::size_t j = i + 1; j < cells.size(); ++j)
      if (cells_meet_truncated(graph, cells[i], cells[j])) uf.unite(static_cast<int>(i), static_cast<int>(j));
  std::vector<RegionComponent> comps;
  std::vector<int> comp_of(cells.size(), -1);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    int root = uf.find(static_cast<int>(i));
    if (comp_of[root] < 0) {
      comp_of[root] = static_cast<int>(comps.size());
      comps.emplace_back();
      comps.back().shape.assign(graph.size() + 1, 0);
    }
    auto& c = comps[comp_of[root]];
    c.cells.push_back(cells[i]);
    if (cell_is_ideal(graph, cells[i])) {
      ++c.shape[graph.size()];
    } else {
      c.has_nonideal = true;
      ++c.shape[cells[i].codim() - 1];
    }
  }
  for (auto& c : comps) std::sort(c.cells.begin(), c.cells.end());
  // Non-ideal components first, then by smallest cell.
  std::stable_sort(comps.begin(), comps.end(), [](const auto& a, const auto& b) {
    if (a.has_nonideal != b.has_nonideal) return a.has_nonideal;
    return a.cells.front() < b.cells.front();
  });
  return comps;
}

PredecessorAudit audit_predecessors(const Ball& ball) {
  PredecessorAudit audit;
  for (ElemId id = 1; id < static_cast<ElemId>(ball.size()); ++id) {
    ++audit.checked;
    int lvl = ball.level_of(predecessor(ball.graph(), ball.element(id)));
    if (lvl != ball.level(id) - 1) {
      ++audit.mismatches;
      if (audit.examples.size() < 8) audit.examples.push_back(id);
    }
  }
  return audit;
}

}  // namespace subdivlab
