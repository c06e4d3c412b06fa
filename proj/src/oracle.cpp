#include "subdivlab/oracle.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>

namespace subdivlab::oracle {

std::vector<std::uint64_t> lattice_sphere_sizes(int d, int levels) {
  std::vector<std::uint64_t> out(levels + 1, 0);
  std::vector<int> p(d, -levels);
  while (true) {
    int r = 0;
    for (int x : p) r = std::max(r, std::abs(x));
    ++out[r];
    int i = 0;
    while (i < d && p[i] == levels) p[i++] = -levels;
    if (i == d) break;
    ++p[i];
  }
  return out;
}

std::vector<std::uint64_t> free_sphere_sizes(int k, int levels) {
  std::vector<std::uint64_t> out(levels + 1, 0);
  std::vector<int> word;
  std::function<void()> grow = [&] {
    ++out[word.size()];
    if (static_cast<int>(word.size()) == levels) return;
    for (int gen = 1; gen <= k; ++gen)
      for (int letter : {gen, -gen}) {
        if (!word.empty() && word.back() == -letter) continue;
        word.push_back(letter);
        grow();
        word.pop_back();
      }
  };
  grow();
  return out;
}

std::vector<std::uint64_t> f2z_sphere_sizes(int levels) {
  using Elem = std::pair<std::vector<int>, int>;
  auto step = [](Elem e, int letter, int dz) {
    if (letter != 0) {
      if (!e.first.empty() && e.first.back() == -letter) {
        e.first.pop_back();
      } else {
        e.first.push_back(letter);
      }
    }
    e.second += dz;
    return e;
  };
  std::vector<std::pair<int, int>> moves{{0, 1}, {0, -1}};
  for (int letter : {1, -1, 2, -2})
    for (int dz : {0, 1, -1}) moves.emplace_back(letter, dz);
  std::set<Elem> seen{Elem{}};
  std::vector<Elem> front{Elem{}};
  std::vector<std::uint64_t> out{1};
  for (int n = 0; n < levels; ++n) {
    std::set<Elem> next;
    for (const auto& e : front)
      for (auto [letter, dz] : moves) {
        Elem h = step(e, letter, dz);
        if (!seen.count(h)) next.insert(h);
      }
    seen.insert(next.begin(), next.end());
    front.assign(next.begin(), next.end());
    out.push_back(next.size());
  }
  return out;
}

namespace {

bool commute(const DefiningGraph& g, int x, int y) {
  int a = std::abs(x) - 1, b = std::abs(y) - 1;
  return a != b && g.adjacent(a, b);
}

std::vector<TraceWord> diagonal_words(const DefiningGraph& g) {
  std::vector<TraceWord> out;
  const int d = g.size();
  for (unsigned sub = 1; sub < (1U << d); ++sub) {
    std::vector<int> gens;
    for (int i = 0; i < d; ++i)
      if ((sub >> i) & 1U) gens.push_back(i);
    bool clique = true;
    for (std::size_t i = 0; i < gens.size(); ++i)
      for (std::size_t j = i + 1; j < gens.size(); ++j)
        clique = clique && g.adjacent(gens[i], gens[j]);
    if (!clique) continue;
    for (unsigned signs = 0; signs < (1U << gens.size()); ++signs) {
      TraceWord w;
      for (std::size_t i = 0; i < gens.size(); ++i)
        w.push_back(((signs >> i) & 1U) ? -(gens[i] + 1) : gens[i] + 1);
      out.push_back(w);
    }
  }
  return out;
}

}  // namespace

TraceWord trace_normal_form(const DefiningGraph& g, TraceWord w) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < w.size() && !changed; ++i)
      for (std::size_t j = i + 1; j < w.size(); ++j) {
        if (w[j] == -w[i]) {
          w.erase(w.begin() + static_cast<std::ptrdiff_t>(j));
          w.erase(w.begin() + static_cast<std::ptrdiff_t>(i));
          changed = true;
          break;
        }
        if (!commute(g, w[i], w[j])) break;
      }
  }
  // Lexicographically least representative: repeatedly emit the smallest
  // letter that commutes with everything before it.
  TraceWord out;
  while (!w.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      bool free_to_front = true;
      for (std::size_t j = 0; j < i && free_to_front; ++j) free_to_front = commute(g, w[j], w[i]);
      if (free_to_front && w[i] < w[best]) best = i;
    }
    out.push_back(w[best]);
    w.erase(w.begin() + static_cast<std::ptrdiff_t>(best));
  }
  return out;
}

std::vector<std::uint64_t> trace_sphere_sizes(const DefiningGraph& g, int levels,
                                              std::size_t cap) {
  const auto moves = diagonal_words(g);
  std::set<TraceWord> seen{TraceWord{}};
  std::vector<TraceWord> front{TraceWord{}};
  std::vector<std::uint64_t> out{1};
  for (int n = 0; n < levels; ++n) {
    std::set<TraceWord> next;
    for (const auto& e : front)
      for (const auto& m : moves) {
        TraceWord w = e;
        w.insert(w.end(), m.begin(), m.end());
        w = trace_normal_form(g, std::move(w));
        if (!seen.count(w)) next.insert(std::move(w));
      }
    seen.insert(next.begin(), next.end());
    if (seen.size() > cap) throw std::runtime_error("oracle element cap exceeded");
    front.assign(next.begin(), next.end());
    out.push_back(next.size());
  }
  return out;
}

namespace {

std::set<TraceWord> rewriting_closure(const DefiningGraph& g, const TraceWord& start) {
  std::set<TraceWord> seen{start};
  std::deque<TraceWord> queue{start};
  while (!queue.empty()) {
    TraceWord w = queue.front();
    queue.pop_front();
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      TraceWord r = w;
      if (w[i] == -w[i + 1]) {
        r.erase(r.begin() + static_cast<std::ptrdiff_t>(i), r.begin() + static_cast<std::ptrdiff_t>(i + 2));
      } else if (commute(g, w[i], w[i + 1])) {
        std::swap(r[i], r[i + 1]);
      } else {
        continue;
      }
      if (seen.insert(r).second) queue.push_back(r);
    }
  }
  return seen;
}

}  // namespace

bool rewriting_equal(const DefiningGraph& g, const TraceWord& u, const TraceWord& v) {
  auto cu = rewriting_closure(g, u);
  auto cv = rewriting_closure(g, v);
  auto shortest = [](const std::set<TraceWord>& s) {
    std::size_t m = SIZE_MAX;
    for (const auto& w : s) m = std::min(m, w.size());
    return m;
  };
  const std::size_t mu = shortest(cu);
  if (mu != shortest(cv)) return false;
  for (const auto& w : cu)
    if (w.size() == mu && cv.count(w)) return true;
  return false;
}

TraceWord rewriting_key(const DefiningGraph& g, const TraceWord& w) {
  auto closure = rewriting_closure(g, w);
  const TraceWord* best = nullptr;
  for (const auto& x : closure)
    if (!best || x.size() < best->size() || (x.size() == best->size() && x < *best)) best = &x;
  return *best;
}

std::vector<std::uint64_t> sphere_sizes(const DefiningGraph& g, int levels) {
  const int d = g.size();
  if (d > 0 && g.edge_count() == static_cast<std::size_t>(d * (d - 1) / 2)) {
    return lattice_sphere_sizes(d, levels);
  }
  if (g.edge_count() == 0) return free_sphere_sizes(d, levels);
  return trace_sphere_sizes(g, levels);
}

}  // namespace subdivlab::oracle
