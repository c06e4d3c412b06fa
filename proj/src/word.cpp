#include "subdivlab/word.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace subdivlab {

namespace {

bool letters_commute(const DefiningGraph& g, int a, int b) { return a != b && g.adjacent(a, b); }

}  // namespace

Word parse_word(const DefiningGraph& g, std::string_view text) {
  Word w;
  std::istringstream in{std::string(text)};
  std::string tok;
  while (in >> tok) {
    std::string name = tok;
    int exp = 1;
    if (auto caret = tok.find('^'); caret != std::string::npos) {
      name = tok.substr(0, caret);
      std::string e = tok.substr(caret + 1);
      auto [ptr, ec] = std::from_chars(e.data(), e.data() + e.size(), exp);
      if (ec != std::errc() || ptr != e.data() + e.size()) {
        throw ParseError("bad exponent in '" + tok + "'");
      }
    }
    auto gen = g.index_of(name);
    if (!gen) throw ParseError("unknown generator letter '" + name + "'");
    for (int k = 0; k < std::abs(exp); ++k) w.push_back({*gen, exp > 0 ? 1 : -1});
  }
  return w;
}

std::string format_word(const DefiningGraph& g, const Word& w) {
  std::string out;
  std::size_t i = 0;
  while (i < w.size()) {
    std::size_t j = i;
    while (j < w.size() && w[j] == w[i]) ++j;
    int exp = static_cast<int>(j - i) * w[i].sign;
    if (!out.empty()) out += ' ';
    out += g.name(w[i].gen);
    if (exp != 1) out += "^" + std::to_string(exp);
    i = j;
  }
  return out;
}

Word letters_of(const SignedSet& t) {
  Word w;
  for (int i = 0; i < kMaxGenerators; ++i)
    if (int s = t.sign(i)) w.push_back({i, s});
  return w;
}

int Syllable::height() const {
  int h = 0;
  for (auto [gen, e] : exps) h = std::max(h, std::abs(e));
  return h;
}

GenMask Syllable::support() const {
  GenMask m = 0;
  for (auto [gen, e] : exps) m |= GenMask{1} << gen;
  return m;
}

std::vector<SignedSet> Syllable::chain() const {
  std::vector<SignedSet> out;
  for (int j = height(); j >= 1; --j) {
    SignedSet s;
    for (auto [gen, e] : exps)
      if (std::abs(e) >= j) (e > 0 ? s.pos : s.neg) |= GenMask{1} << gen;
    out.push_back(s);
  }
  return out;
}

NormalForm::NormalForm(std::vector<Syllable> syllables) : syllables_(std::move(syllables)) {
  for (const auto& s : syllables_) {
    tlen_ += s.height();
    for (auto [gen, e] : s.exps) {
      key_.push_back(gen);
      key_.push_back(e);
    }
    key_.push_back(-1);
  }
}

Word NormalForm::flatten() const {
  Word w;
  for (const auto& s : syllables_)
    for (auto [gen, e] : s.exps)
      for (int k = 0; k < std::abs(e); ++k) w.push_back({gen, e > 0 ? 1 : -1});
  return w;
}

std::vector<SignedSet> NormalForm::chain() const {
  std::vector<SignedSet> out;
  for (const auto& s : syllables_) {
    auto c = s.chain();
    out.insert(out.end(), c.begin(), c.end());
  }
  return out;
}

std::vector<int> NormalForm::exponent_sums(int d) const {
  std::vector<int> v(d, 0);
  for (const auto& s : syllables_)
    for (auto [gen, e] : s.exps) v[gen] += e;
  return v;
}

std::size_t KeyHash::operator()(const std::vector<std::int32_t>& k) const noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (auto x : k) {
    h ^= static_cast<std::uint32_t>(x);
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h ^ (h >> 29));
}

Word reduce_word(const DefiningGraph& g, const Word& w) {
  Word out;
  out.reserve(w.size());
  for (const Letter& x : w) {
    bool cancelled = false;
    for (std::size_t j = out.size(); j-- > 0;) {
      if (out[j].gen == x.gen) {
        if (out[j].sign == -x.sign) {
          out.erase(out.begin() + static_cast<std::ptrdiff_t>(j));
          cancelled = true;
        }
        break;
      }
      if (!letters_commute(g, out[j].gen, x.gen)) break;
    }
    if (!cancelled) out.push_back(x);
  }
  return out;
}

NormalForm normalize(const DefiningGraph& g, const Word& w) {
  for (const Letter& x : w) {
    if (x.gen < 0 || x.gen >= g.size() || (x.sign != 1 && x.sign != -1)) {
      throw ParseError("letter does not belong to the defining graph");
    }
  }
  Word r = reduce_word(g, w);
  const std::size_t n = r.size();
  // blockers[i] counts unused letters before i that do not commute with it;
  // a letter is front-available exactly when its count is zero.
  std::vector<int> blockers(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (!letters_commute(g, r[j].gen, r[i].gen)) ++blockers[i];
  std::vector<char> used(n, 0);
  std::size_t remaining = n;
  std::vector<Syllable> syllables;
  std::vector<int> exps(g.size(), 0);

  while (remaining > 0) {
    GenMask front = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (!used[i] && blockers[i] == 0) front |= GenMask{1} << r[i].gen;
    GenMask admitted = 0;
    for (int gen = 0; gen < g.size(); ++gen) {
      if (!((front >> gen) & 1U)) continue;
      if ((admitted & ~g.neighbors(gen)) == 0) admitted |= GenMask{1} << gen;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i] || blockers[i] != 0 || !((admitted >> r[i].gen) & 1U)) continue;
      used[i] = 1;
      --remaining;
      exps[r[i].gen] += r[i].sign;
      for (std::size_t k = i + 1; k < n; ++k)
        if (!letters_commute(g, r[i].gen, r[k].gen)) --blockers[k];
    }
    Syllable s;
    for (int gen = 0; gen < g.size(); ++gen) {
      if (exps[gen] != 0) s.exps.emplace_back(gen, exps[gen]);
      exps[gen] = 0;
    }
    syllables.push_back(std::move(s));
  }
  return NormalForm(std::move(syllables));
}

bool equals(const DefiningGraph& g, const Word& u, const Word& v) {
  return normalize(g, u) == normalize(g, v);
}

NormalForm translate(const DefiningGraph& g, const NormalForm& nf, const SignedSet& t) {
  if (t.empty() || !is_spherical(g, t)) {
    throw std::invalid_argument("translate needs a nonempty spherical signed set");
  }
  Word w = nf.flatten();
  Word tl = letters_of(t);
  w.insert(w.end(), tl.begin(), tl.end());
  return normalize(g, w);
}

NormalForm multiply(const DefiningGraph& g, const NormalForm& a, const NormalForm& b) {
  Word w = a.flatten();
  Word bw = b.flatten();
  w.insert(w.end(), bw.begin(), bw.end());
  return normalize(g, w);
}

NormalForm inverse(const DefiningGraph& g, const NormalForm& nf) {
  Word w = nf.flatten();
  std::reverse(w.begin(), w.end());
  for (auto& x : w) x = x.inverse();
  return normalize(g, w);
}

NormalForm predecessor(const DefiningGraph& g, const NormalForm& nf) {
  if (nf.is_identity()) throw std::invalid_argument("the identity has no predecessor");
  std::vector<Syllable> syl = nf.syllables();
  int h = syl.front().height();
  auto& exps = syl.front().exps;
  for (auto& [gen, e] : exps)
    if (std::abs(e) == h) e -= (e > 0 ? 1 : -1);
  std::erase_if(exps, [](const auto& p) { return p.second == 0; });
  if (exps.empty()) syl.erase(syl.begin());
  return normalize(g, NormalForm(std::move(syl)).flatten());
}

std::string format_normal_form(const DefiningGraph& g, const NormalForm& nf) {
  if (nf.is_identity()) return "1";
  std::string out;
  for (const auto& s : nf.syllables()) {
    out += "(";
    bool first = true;
    for (auto [gen, e] : s.exps) {
      if (!first) out += " ";
      first = false;
      out += g.name(gen);
      if (e != 1) out += "^" + std::to_string(e);
    }
    out += ")";
  }
  return out;
}

}  // namespace subdivlab
