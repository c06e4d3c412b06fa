#include "subdivlab/raag.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "json.hpp"

namespace subdivlab {

namespace {

std::vector<int> mask_bits(GenMask m) {
  std::vector<int> out;
  while (m) {
    out.push_back(std::countr_zero(m));
    m &= m - 1;
  }
  return out;
}

}  // namespace

DefiningGraph::DefiningGraph(std::vector<std::string> generators,
                             const std::vector<std::pair<std::string, std::string>>& edges)
    : names_(std::move(generators)), adj_(names_.size(), 0) {
  if (names_.size() > static_cast<std::size_t>(kMaxGenerators)) {
    throw ParseError("too many generators (limit " + std::to_string(kMaxGenerators) + ")");
  }
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw ParseError("empty generator name");
    if (!seen.insert(n).second) throw ParseError("duplicate generator '" + n + "'");
  }
  std::set<std::pair<int, int>> seen_edges;
  for (const auto& [x, y] : edges) {
    auto i = index_of(x);
    auto j = index_of(y);
    if (!i) throw ParseError("edge references unknown generator '" + x + "'");
    if (!j) throw ParseError("edge references unknown generator '" + y + "'");
    if (*i == *j) throw ParseError("self-loop on generator '" + x + "'");
    auto key = std::minmax(*i, *j);
    if (!seen_edges.insert(key).second) {
      throw ParseError("duplicate edge " + x + "-" + y);
    }
    adj_[*i] |= GenMask{1} << *j;
    adj_[*j] |= GenMask{1} << *i;
  }
}

DefiningGraph DefiningGraph::complete(int d) {
  std::vector<std::string> names;
  std::vector<std::pair<std::string, std::string>> edges;
  for (int i = 0; i < d; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) edges.emplace_back(names[i], names[j]);
  return DefiningGraph(names, edges);
}

DefiningGraph DefiningGraph::edgeless(int d) {
  std::vector<std::string> names;
  for (int i = 0; i < d; ++i) names.push_back(std::string(1, static_cast<char>('a' + i)));
  return DefiningGraph(names, {});
}

DefiningGraph DefiningGraph::from_json_text(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("generators") || !j["generators"].is_array()) {
    throw ParseError("defining graph needs a \"generators\" array");
  }
  std::vector<std::string> names;
  for (const auto& g : j["generators"]) {
    if (!g.is_string()) throw ParseError("generator names must be strings");
    names.push_back(g.get<std::string>());
  }
  std::vector<std::pair<std::string, std::string>> edges;
  if (j.contains("edges")) {
    if (!j["edges"].is_array()) throw ParseError("\"edges\" must be an array");
    for (const auto& e : j["edges"]) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_string() || !e[1].is_string()) {
        throw ParseError("each edge must be a pair of generator names");
      }
      edges.emplace_back(e[0].get<std::string>(), e[1].get<std::string>());
    }
  }
  return DefiningGraph(std::move(names), edges);
}

DefiningGraph DefiningGraph::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::optional<int> DefiningGraph::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return std::nullopt;
}

bool DefiningGraph::is_clique(GenMask mask) const {
  for (GenMask m = mask; m; m &= m - 1) {
    int i = std::countr_zero(m);
    GenMask others = mask & ~(GenMask{1} << i);
    if ((others & ~adj_[i]) != 0) return false;
  }
  return true;
}

bool DefiningGraph::is_connected() const {
  if (size() == 0) return true;
  GenMask seen = 1, frontier = 1;
  while (frontier) {
    GenMask next = 0;
    for (int i : mask_bits(frontier)) next |= adj_[i];
    frontier = next & ~seen;
    seen |= next;
  }
  return seen == all_mask();
}

std::size_t DefiningGraph::edge_count() const { return edges().size(); }

std::vector<std::pair<int, int>> DefiningGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < size(); ++i)
    for (int j = i + 1; j < size(); ++j)
      if (adjacent(i, j)) out.emplace_back(i, j);
  return out;
}

DefiningGraph DefiningGraph::induced(GenMask mask) const {
  std::vector<std::string> names;
  std::vector<std::pair<std::string, std::string>> es;
  for (int i : mask_bits(mask & all_mask())) names.push_back(names_[i]);
  for (auto [i, j] : edges())
    if (((mask >> i) & 1U) && ((mask >> j) & 1U)) es.emplace_back(names_[i], names_[j]);
  return DefiningGraph(names, es);
}

std::string DefiningGraph::to_json_text() const {
  nlohmann::json j;
  j["generators"] = names_;
  nlohmann::json es = nlohmann::json::array();
  for (auto [a, b] : edges()) es.push_back({names_[a], names_[b]});
  j["edges"] = es;
  return j.dump();
}

std::uint64_t DefiningGraph::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : to_json_text()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string DefiningGraph::hash_hex() const {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << hash();
  return os.str();
}

std::vector<std::vector<int>> DefiningGraph::automorphisms() const {
  if (size() > 8) throw std::invalid_argument("automorphism search limited to 8 generators");
  std::vector<std::vector<int>> out;
  std::vector<int> perm(size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    for (int i = 0; i < size() && ok; ++i)
      for (int j = i + 1; j < size() && ok; ++j)
        ok = adjacent(i, j) == adjacent(perm[i], perm[j]);
    if (ok) out.push_back(perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

int SignedSet::size() const { return std::popcount(support()); }

std::vector<SignedSet> nonempty_sub_signed_sets(const SignedSet& s) {
  std::vector<SignedSet> out;
  GenMask sup = s.support();
  for (GenMask sub = sup; sub; sub = (sub - 1) & sup) out.push_back(s.restricted(sub));
  std::sort(out.begin(), out.end(),
            [](const SignedSet& a, const SignedSet& b) { return a.support() < b.support(); });
  return out;
}

std::string format_signed_set(const DefiningGraph& g, const SignedSet& s) {
  std::string out = "(";
  bool first = true;
  for (int i = 0; i < g.size(); ++i) {
    int sg = s.sign(i);
    if (!sg) continue;
    if (!first) out += ",";
    first = false;
    out += g.name(i) + (sg > 0 ? ":+" : ":-");
  }
  return out + ")";
}

std::string format_diagonal(const DefiningGraph& g, const SignedSet& s) {
  std::string out;
  for (int i = 0; i < g.size(); ++i) {
    int sg = s.sign(i);
    if (!sg) continue;
    if (!out.empty()) out += " ";
    out += g.name(i);
    if (sg < 0) out += "^-1";
  }
  return out;
}

SignedSet parse_signed_set(const DefiningGraph& g, std::string_view text) {
  // Accepts "(a:+,b:-)" or "a:+,b:-".
  std::string t(text);
  t.erase(std::remove_if(t.begin(), t.end(),
                         [](char c) { return c == '(' || c == ')' || c == ' '; }),
          t.end());
  SignedSet s;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto colon = item.find(':');
    if (colon == std::string::npos || colon + 2 != item.size()) {
      throw ParseError("bad signed entry '" + item + "'");
    }
    auto gen = g.index_of(item.substr(0, colon));
    if (!gen) throw ParseError("unknown generator in '" + item + "'");
    char sg = item[colon + 1];
    if (sg != '+' && sg != '-') throw ParseError("bad sign in '" + item + "'");
    if (s.support() >> *gen & 1U) throw ParseError("generator repeated in signed set");
    (sg == '+' ? s.pos : s.neg) |= GenMask{1} << *gen;
  }
  return s;
}

bool is_spherical(const DefiningGraph& g, const SignedSet& s) {
  return (s.pos & s.neg) == 0 && g.is_clique(s.support());
}

bool clique_less(GenMask a, GenMask b) {
  int pa = std::popcount(a), pb = std::popcount(b);
  if (pa != pb) return pa < pb;
  return mask_bits(a) < mask_bits(b);
}

std::vector<GenMask> enumerate_cliques(const DefiningGraph& g) {
  std::vector<GenMask> out;
  // Grow cliques by appending higher-index common neighbours.
  std::vector<GenMask> stack;
  for (int i = 0; i < g.size(); ++i) stack.push_back(GenMask{1} << i);
  while (!stack.empty()) {
    GenMask c = stack.back();
    stack.pop_back();
    out.push_back(c);
    int top = 31 - std::countl_zero(c);
    GenMask common = g.all_mask();
    for (int i : mask_bits(c)) common &= g.neighbors(i);
    for (int j = top + 1; j < g.size(); ++j)
      if ((common >> j) & 1U) stack.push_back(c | (GenMask{1} << j));
  }
  std::sort(out.begin(), out.end(), clique_less);
  return out;
}

std::vector<SignedSet> diagonal_elements(const DefiningGraph& g) {
  std::vector<SignedSet> out;
  for (GenMask c : enumerate_cliques(g)) {
    auto bits = mask_bits(c);
    for (GenMask signs = 0; signs < (GenMask{1} << bits.size()); ++signs) {
      SignedSet s;
      for (std::size_t k = 0; k < bits.size(); ++k)
        ((signs >> k) & 1U ? s.neg : s.pos) |= GenMask{1} << bits[k];
      out.push_back(s);
    }
  }
  return out;
}

bool cell_is_ideal(const DefiningGraph& g, const CubeCell& c) {
  return !g.is_clique(c.v.support());
}

bool cells_intersect(const CubeCell& v, const CubeCell& w) {
  return (v.v.pos & w.v.neg) == 0 && (v.v.neg & w.v.pos) == 0;
}

bool cells_meet_truncated(const DefiningGraph& g, const CubeCell& v, const CubeCell& w) {
  if (!cells_intersect(v, w)) return false;
  if (cell_is_ideal(g, v) || cell_is_ideal(g, w)) return true;
  return g.is_clique(v.v.support() | w.v.support());
}

std::vector<SignedSet> ideal_facets(const DefiningGraph& g) {
  std::vector<SignedSet> out;
  // Minimal non-cliques are exactly the non-adjacent pairs.
  for (int i = 0; i < g.size(); ++i) {
    for (int j = i + 1; j < g.size(); ++j) {
      if (g.adjacent(i, j)) continue;
      for (int si : {1, -1})
        for (int sj : {1, -1}) {
          SignedSet s = SignedSet::single(i, si);
          SignedSet t = SignedSet::single(j, sj);
          out.push_back({s.pos | t.pos, s.neg | t.neg});
        }
    }
  }
  return out;
}

std::string format_mask(const DefiningGraph& g, GenMask mask) {
  std::string out = "{";
  bool first = true;
  for (int i : mask_bits(mask)) {
    if (!first) out += ",";
    first = false;
    out += g.name(i);
  }
  return out + "}";
}

}  // namespace subdivlab
