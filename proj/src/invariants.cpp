#include "subdivlab/invariants.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <set>

namespace subdivlab {

using Rational = boost::multiprecision::cpp_rational;

std::string GrowthReport::classification() const {
  if (exponential) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "exponential(%.6g)", ratio);
    return buf;
  }
  return "polynomial(" + std::to_string(degree) + ")";
}

double spectral_radius(const std::vector<std::vector<long long>>& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  if (n == 0) return 0.0;
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = static_cast<double>(m[i][j]);
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

bool exceeds_one(const std::vector<std::vector<long long>>& m) {
  // A nonnegative integer matrix has spectral radius > 1 exactly when some
  // strongly connected block has a row summing (within the block) to 2 or
  // more; blocks whose rows all sum to 1 are weighted cycles of radius 1.
  const int n = static_cast<int>(m.size());
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) reach[i][j] = m[i][j] > 0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      if (reach[i][k])
        for (int j = 0; j < n; ++j) reach[i][j] = reach[i][j] || reach[k][j];
  for (int i = 0; i < n; ++i) {
    if (!reach[i][i]) continue;
    long long inside = 0;
    for (int j = 0; j < n; ++j)
      if (reach[i][j] && reach[j][i]) inside += m[i][j];
    if (inside >= 2) return true;
  }
  return false;
}

namespace {

// Berlekamp-Massey over Q; returns the connection polynomial C with C[0] = 1.
std::vector<Rational> berlekamp_massey(const std::vector<long long>& s, int& length) {
  std::vector<Rational> c{1}, b{1};
  Rational last = 1;
  int l = 0, shift = 1;
  for (std::size_t n = 0; n < s.size(); ++n) {
    Rational d = s[n];
    for (int i = 1; i <= l; ++i) d += c[i] * s[n - i];
    if (d == 0) {
      ++shift;
      continue;
    }
    auto t = c;
    Rational coef = d / last;
    if (c.size() < b.size() + shift) c.resize(b.size() + shift, 0);
    for (std::size_t i = 0; i < b.size(); ++i) c[i + shift] -= coef * b[i];
    if (2 * l <= static_cast<int>(n)) {
      l = static_cast<int>(n) + 1 - l;
      b = std::move(t);
      last = d;
      shift = 1;
    } else {
      ++shift;
    }
  }
  c.resize(l + 1, 0);
  length = l;
  return c;
}

std::string to_text(const Rational& r) {
  auto num = boost::multiprecision::numerator(r);
  auto den = boost::multiprecision::denominator(r);
  return den == 1 ? num.str() : num.str() + "/" + den.str();
}

}  // namespace

std::vector<std::string> minimal_recurrence(const std::vector<long long>& seq) {
  int l = 0;
  auto c = berlekamp_massey(seq, l);
  if (2 * l >= static_cast<int>(seq.size())) {
    throw FitError("fit underdetermined: a recurrence of order " + std::to_string(l) +
                   " needs at least " + std::to_string(2 * l + 1) + " levels");
  }
  std::vector<std::string> out;
  for (int i = 1; i <= l; ++i) out.push_back(to_text(-c[i]));
  return out;
}

GrowthReport growth(const std::vector<Tiling>& tilings, const SubdivisionRule& rule) {
  GrowthReport r;
  for (const auto& t : tilings) r.totals.push_back(t.nonideal_count());
  for (int l = 0; l <= rule.typed_levels && l < static_cast<int>(tilings.size()); ++l) {
    std::vector<std::size_t> row;
    for (const auto& tt : rule.types) row.push_back(tt.count_by_level[l]);
    r.by_type.push_back(std::move(row));
  }
  std::vector<long long> seq(r.totals.begin(), r.totals.end());
  try {
    r.recurrence = minimal_recurrence(seq);
  } catch (const FitError&) {
    r.recurrence.clear();
  }

  if (rule.stable && !rule.nonideal_types().empty()) {
    r.method = "transition-matrix";
    r.transition = rule.transition();
    r.transition_types = rule.nonideal_types();
    if (exceeds_one(r.transition)) {
      r.exponential = true;
      r.ratio = spectral_radius(r.transition);
      return r;
    }
    // Smallest m with v (C - I)^m = 0 for the level-0 count vector v.
    const std::size_t k = r.transition.size();
    std::vector<long long> v;
    for (int id : r.transition_types) v.push_back(static_cast<long long>(rule.types[id].count_by_level[0]));
    int m = 0;
    auto zero = [](const std::vector<long long>& x) {
      return std::all_of(x.begin(), x.end(), [](long long y) { return y == 0; });
    };
    while (!zero(v) && m <= static_cast<int>(k) + 1) {
      std::vector<long long> w(k, 0);
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < k; ++j) w[j] += v[i] * (r.transition[i][j] - (i == j ? 1 : 0));
      v = std::move(w);
      ++m;
    }
    r.degree = std::max(0, m - 1);
    return r;
  }

  r.method = "recurrence";
  if (seq.size() < 4) throw FitError("fit underdetermined: at least 4 levels are needed");
  // Polynomial when some row of successive differences (two or more entries) vanishes.
  std::vector<long long> d = seq;
  for (int k = 0; d.size() >= 2; ++k) {
    if (std::all_of(d.begin(), d.end(), [](long long x) { return x == 0; })) {
      r.degree = std::max(0, k - 1);
      return r;
    }
    std::vector<long long> next;
    for (std::size_t i = 1; i < d.size(); ++i) next.push_back(d[i] - d[i - 1]);
    d = std::move(next);
  }
  if (r.recurrence.empty()) {
    throw FitError("fit underdetermined: the count sequence has no confirmed recurrence yet");
  }
  // Spectral radius of the recurrence's companion matrix.
  const std::size_t order = r.recurrence.size();
  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(order),
                                               static_cast<Eigen::Index>(order));
  for (std::size_t i = 0; i < order; ++i) {
    comp(0, static_cast<Eigen::Index>(i)) = Rational(r.recurrence[i]).convert_to<double>();
    if (i + 1 < order) comp(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(i)) = 1.0;
  }
  const double rho = Eigen::EigenSolver<Eigen::MatrixXd>(comp, false).eigenvalues().cwiseAbs().maxCoeff();
  if (rho <= 1.0 + 1e-6) throw FitError("fit underdetermined: recurrence is neither polynomial nor exponential on this data");
  r.exponential = true;
  r.ratio = rho;
  return r;
}

std::string EndsVerdict::to_string() const {
  switch (kind) {
    case Kind::Count: return std::to_string(value);
    case Kind::Unbounded: return "unbounded(>=" + std::to_string(value) + ")";
    case Kind::Undetermined: return "undetermined";
  }
  return "undetermined";
}

std::vector<int> tile_components(const Tiling& t, std::size_t* count) {
  std::vector<int> parent(t.tiles.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& e : t.edges)
    if (!t.tiles[e.a].ideal && !t.tiles[e.b].ideal) parent[find(e.a)] = find(e.b);
  std::vector<int> comp(t.tiles.size(), -1), label(t.tiles.size(), -1);
  int next = 0;
  for (std::size_t i = 0; i < t.tiles.size(); ++i) {
    if (t.tiles[i].ideal) continue;
    int r = find(static_cast<int>(i));
    if (label[r] < 0) label[r] = next++;
    comp[i] = label[r];
  }
  if (count) *count = static_cast<std::size_t>(next);
  return comp;
}

EndsReport ends(const std::vector<Tiling>& tilings, int window) {
  EndsReport r;
  r.window = window;
  std::vector<std::vector<int>> comps;
  for (const auto& t : tilings) {
    std::size_t n = 0;
    comps.push_back(tile_components(t, &n));
    r.components.push_back(n);
  }
  r.parent_component.emplace_back();
  r.bijective.push_back(0);
  for (std::size_t l = 1; l < tilings.size(); ++l) {
    std::vector<std::set<int>> ups(r.components[l]);
    for (std::size_t i = 0; i < tilings[l].tiles.size(); ++i) {
      const Tile& t = tilings[l].tiles[i];
      if (t.ideal || t.parent < 0) continue;
      ups[comps[l][i]].insert(comps[l - 1][t.parent]);
    }
    std::vector<int> map;
    std::set<int> hit;
    bool ok = r.components[l] == r.components[l - 1];
    for (const auto& u : ups) {
      map.push_back(u.size() == 1 ? *u.begin() : -1);
      ok = ok && u.size() == 1 && hit.insert(*u.begin()).second;
    }
    r.parent_component.push_back(std::move(map));
    r.bijective.push_back(ok ? 1 : 0);
  }
  const int levels = static_cast<int>(tilings.size());
  if (window < 2 || levels < window) return r;
  const int first = levels - window;
  bool stable = true, increasing = true;
  for (int l = first + 1; l < levels; ++l) {
    stable = stable && r.components[l] == r.components[l - 1] && r.bijective[l];
    increasing = increasing && r.components[l] > r.components[l - 1];
  }
  if (stable) {
    r.verdict = {EndsVerdict::Kind::Count, r.components.back()};
  } else if (increasing) {
    r.verdict = {EndsVerdict::Kind::Unbounded, r.components.back()};
  }
  return r;
}

MeshReport mesh_certificate(const std::vector<Tiling>& tilings, const SubdivisionRule& rule) {
  if (!rule.stable) throw std::invalid_argument("mesh certificate needs a stable rule");
  MeshReport r;
  std::map<std::string, int> node_id;
  auto node = [&](const std::string& key) {
    auto [it, fresh] = node_id.emplace(key, static_cast<int>(r.nodes.size()));
    if (fresh) r.nodes.push_back(key);
    return it->second;
  };
  auto single_key = [](int t) { return "single " + std::to_string(t); };
  auto pair_key = [](int a, int b, EdgeKind k) {
    if (a > b) std::swap(a, b);
    return "pair " + std::to_string(a) + " " + std::to_string(b) + " " + to_string(k);
  };
  // A type whose tiles have exactly one child, and that child non-ideal.
  auto sole_type = [&](int t) {
    const auto& ch = rule.types[t].children;
    if (ch.size() != 1 || ch.begin()->second != 1) return -1;
    return rule.types[ch.begin()->first].ideal ? -1 : ch.begin()->first;
  };
  auto sole_child = [&](const Tiling& below, const Tile& t) {
    return t.children.size() == 1 && !below.tiles[t.children[0]].ideal ? t.children[0] : -1;
  };
  std::set<std::pair<int, int>> arcs;
  for (const auto& tt : rule.types) {
    if (tt.ideal) continue;
    int c = sole_type(tt.id);
    if (c < 0) continue;
    int from = node(single_key(tt.id));
    if (sole_type(c) >= 0) arcs.emplace(from, node(single_key(c)));
  }
  const int top = std::min(rule.typed_levels, static_cast<int>(tilings.size()) - 1);
  for (int l = 0; l < top; ++l) {
    const auto& level = tilings[l];
    const auto& below = tilings[l + 1];
    auto adj_below = below.adjacency();
    for (const auto& e : level.edges) {
      const Tile& x = level.tiles[e.a];
      const Tile& y = level.tiles[e.b];
      if (x.ideal || y.ideal) continue;
      int from = node(pair_key(x.type, y.type, e.kind));
      for (int cx : x.children)
        for (int cy : y.children) {
          if (below.tiles[cx].ideal || below.tiles[cy].ideal) continue;
          if (!std::binary_search(adj_below[cx].begin(), adj_below[cx].end(), cy)) continue;
          EdgeKind kind = EdgeKind::FlatRidge;
          for (const auto& f : below.edges)
            if (f.a == std::min(cx, cy) && f.b == std::max(cx, cy)) kind = f.kind;
          arcs.emplace(from, node(pair_key(below.tiles[cx].type, below.tiles[cy].type, kind)));
        }
    }
  }
  r.arcs.assign(arcs.begin(), arcs.end());

  // Depth-first search for a cycle.
  std::vector<std::vector<int>> out(r.nodes.size());
  for (auto [a, b] : r.arcs) out[a].push_back(b);
  std::vector<int> color(r.nodes.size(), 0), via(r.nodes.size(), -1);
  std::vector<int> cycle;
  for (int s = 0; s < static_cast<int>(r.nodes.size()) && cycle.empty(); ++s) {
    if (color[s]) continue;
    std::vector<std::pair<int, std::size_t>> stack{{s, 0}};
    color[s] = 1;
    while (!stack.empty() && cycle.empty()) {
      auto& [v, i] = stack.back();
      if (i == out[v].size()) {
        color[v] = 2;
        stack.pop_back();
        continue;
      }
      int w = out[v][i++];
      if (color[w] == 1) {
        for (int x = v; x != w; x = via[x]) cycle.push_back(x);
        cycle.push_back(w);
        std::reverse(cycle.begin(), cycle.end());
      } else if (color[w] == 0) {
        color[w] = 1;
        via[w] = v;
        stack.emplace_back(w, 0);
      }
    }
  }
  r.certified = cycle.empty();
  for (int v : cycle) r.orbit.push_back(r.nodes[v]);
  if (r.certified) return r;

  // Concrete tiles for the first orbit node.
  const std::string& first = r.orbit.front();
  for (int l = 0; l < top && r.witness_tiles.empty(); ++l) {
    const auto& level = tilings[l];
    if (first.rfind("single", 0) == 0) {
      for (std::size_t i = 0; i < level.tiles.size(); ++i) {
        const Tile& t = level.tiles[i];
        if (!t.ideal && single_key(t.type) == first && sole_child(tilings[l + 1], t) >= 0) {
          r.witness_level = l;
          r.witness_tiles = {static_cast<int>(i)};
          break;
        }
      }
    } else {
      for (const auto& e : level.edges) {
        if (pair_key(level.tiles[e.a].type, level.tiles[e.b].type, e.kind) == first) {
          r.witness_level = l;
          r.witness_tiles = {e.a, e.b};
          break;
        }
      }
    }
  }
  return r;
}

namespace {

std::vector<int> bfs(const std::vector<std::vector<int>>& adj, int src, std::vector<int>* via) {
  std::vector<int> dist(adj.size(), -1);
  if (via) via->assign(adj.size(), -1);
  std::deque<int> q{src};
  dist[src] = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (int w : adj[v]) {
      if (dist[w] >= 0) continue;
      dist[w] = dist[v] + 1;
      if (via) (*via)[w] = v;
      q.push_back(w);
    }
  }
  return dist;
}

std::vector<int> walk_back(const std::vector<int>& via, int from, int to) {
  std::vector<int> path;
  for (int x = to; x != -1; x = via[x]) {
    path.push_back(x);
    if (x == from) break;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

void least_squares(const std::vector<double>& x, const std::vector<double>& y, double& slope,
                   double& intercept) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  slope = den == 0 ? 0 : (n * sxy - sx * sy) / den;
  intercept = (sy - slope * sx) / n;
}

}  // namespace

DivergenceReport divergence_diameter(const std::vector<Tiling>& tilings,
                                     const DivergenceOptions& opts) {
  DivergenceReport r;
  for (const auto& t : tilings) {
    LevelDiameter d;
    d.level = t.level;
    // Dual graph on non-ideal tiles, indexed like the tiling.
    std::vector<int> nodes;
    for (std::size_t i = 0; i < t.tiles.size(); ++i)
      if (!t.tiles[i].ideal) nodes.push_back(static_cast<int>(i));
    d.tiles = nodes.size();
    std::vector<std::vector<int>> adj(t.tiles.size());
    for (const auto& e : t.edges) {
      if (t.tiles[e.a].ideal || t.tiles[e.b].ideal) continue;
      adj[e.a].push_back(e.b);
      adj[e.b].push_back(e.a);
    }
    if (nodes.empty()) {
      r.levels.push_back(d);
      continue;
    }
    std::vector<int> via;
    auto from_first = bfs(adj, nodes.front(), &via);
    if (std::any_of(nodes.begin(), nodes.end(), [&](int v) { return from_first[v] < 0; })) {
      d.finite = false;
      d.diameter = -1;
      r.levels.push_back(d);
      continue;
    }
    if (nodes.size() > opts.exact_limit) {
      d.bound_only = true;
      int u = nodes.front();
      for (int v : nodes)
        if (from_first[v] > from_first[u]) u = v;
      auto du = bfs(adj, u, &via);
      int w = u;
      for (int v : nodes)
        if (du[v] > du[w]) w = v;
      d.diameter = du[w];
      d.from = u;
      d.to = w;
      d.path = walk_back(via, u, w);
    } else {
      d.diameter = -1;
      for (int s : nodes) {
        auto ds = bfs(adj, s, nullptr);
        for (int v : nodes) {
          if (ds[v] > d.diameter) {
            d.diameter = ds[v];
            d.from = s;
            d.to = v;
          }
        }
      }
      bfs(adj, d.from, &via);
      d.path = walk_back(via, d.from, d.to);
    }
    r.levels.push_back(std::move(d));
  }

  std::vector<double> xs, ys;
  for (const auto& d : r.levels)
    if (d.finite && d.tiles > 0) {
      xs.push_back(d.level);
      ys.push_back(d.diameter);
    }
  r.fitted_points = xs.size();
  bool all_infinite = std::none_of(r.levels.begin(), r.levels.end(),
                                   [](const LevelDiameter& d) { return d.level > 0 && d.finite; });
  if (all_infinite && r.levels.size() > 1) {
    r.fit = "infinite";
    return r;
  }
  if (xs.size() < 3) {
    r.fit = "undetermined";
    return r;
  }
  least_squares(xs, ys, r.linear_slope, r.linear_intercept);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double e = ys[i] - (r.linear_intercept + r.linear_slope * xs[i]);
    r.linear_sse += e * e;
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (ys[i] > 0) {
      lx.push_back(xs[i]);
      ly.push_back(std::log(ys[i]));
    }
  if (lx.size() >= 2) {
    double b = 0, a = 0;
    least_squares(lx, ly, b, a);
    r.exp_rate = b;
    r.exp_scale = std::exp(a);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double e = ys[i] - r.exp_scale * std::exp(r.exp_rate * xs[i]);
      r.exp_sse += e * e;
    }
  }
  if (r.linear_sse <= 0.1 * r.exp_sse || r.linear_sse < 1e-9) {
    r.fit = "linear";
  } else if (r.exp_sse <= 0.1 * r.linear_sse) {
    r.fit = "exponential";
  } else {
    r.fit = "undetermined";
  }
  return r;
}

bool verify_witness(const Tiling& t, const LevelDiameter& d) {
  if (!d.finite || d.path.empty()) return false;
  if (d.path.front() != d.from || d.path.back() != d.to) return false;
  if (static_cast<int>(d.path.size()) - 1 != d.diameter) return false;
  auto adj = t.adjacency();
  for (std::size_t i = 0; i + 1 < d.path.size(); ++i) {
    const auto& a = adj[d.path[i]];
    if (!std::binary_search(a.begin(), a.end(), d.path[i + 1])) return false;
  }
  // The endpoints really are that far apart.
  auto dist = bfs(adj, d.from, nullptr);
  return dist[d.to] == d.diameter;
}

}  // namespace subdivlab
