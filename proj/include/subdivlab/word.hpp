#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "subdivlab/raag.hpp"

namespace subdivlab {

struct Letter {
  int gen = 0;
  int sign = 1;  // +1 or -1
  Letter inverse() const { return {gen, -sign}; }
  friend bool operator==(const Letter&, const Letter&) = default;
  friend auto operator<=>(const Letter&, const Letter&) = default;
};

using Word = std::vector<Letter>;

/// Parses "a^5 b^-2 c^3" style literals. Throws ParseError on unknown letters.
Word parse_word(const DefiningGraph& g, std::string_view text);
std::string format_word(const DefiningGraph& g, const Word& w);
Word letters_of(const SignedSet& t);

/// A maximal spherical piece of a normal form: exponents per generator on a
/// clique, stored sorted by generator.
struct Syllable {
  std::vector<std::pair<int, int>> exps;

  int height() const;  // max |exponent|
  GenMask support() const;
  /// Diagonal generators of the piece, leftmost first: for j = height..1 the
  /// signed set {g : |exp(g)| >= j}.
  std::vector<SignedSet> chain() const;

  friend bool operator==(const Syllable&, const Syllable&) = default;
  friend auto operator<=>(const Syllable&, const Syllable&) = default;
};

class NormalForm {
 public:
  NormalForm() = default;
  explicit NormalForm(std::vector<Syllable> syllables);

  const std::vector<Syllable>& syllables() const { return syllables_; }
  bool is_identity() const { return syllables_.empty(); }
  /// Total diagonal-chain length.
  int tlen() const { return tlen_; }
  Word flatten() const;
  /// Flat integer encoding used for hashing and canonical ordering.
  const std::vector<std::int32_t>& key() const { return key_; }
  /// The whole element as a chain of diagonal generators, leftmost first.
  std::vector<SignedSet> chain() const;
  std::vector<int> exponent_sums(int d) const;

  friend bool operator==(const NormalForm& a, const NormalForm& b) { return a.key_ == b.key_; }
  /// Canonical element order: shorter chains first, then lexicographic key.
  friend bool operator<(const NormalForm& a, const NormalForm& b) {
    if (a.tlen_ != b.tlen_) return a.tlen_ < b.tlen_;
    return a.key_ < b.key_;
  }

 private:
  std::vector<Syllable> syllables_;
  int tlen_ = 0;
  std::vector<std::int32_t> key_;
};

struct KeyHash {
  std::size_t operator()(const std::vector<std::int32_t>& k) const noexcept;
};

/// Free and commutation cancellation; the result is a geodesic word in the
/// standard generators.
Word reduce_word(const DefiningGraph& g, const Word& w);
NormalForm normalize(const DefiningGraph& g, const Word& w);
bool equals(const DefiningGraph& g, const Word& u, const Word& v);
/// Right multiplication by the diagonal generator of a spherical signed set.
NormalForm translate(const DefiningGraph& g, const NormalForm& nf, const SignedSet& t);
NormalForm multiply(const DefiningGraph& g, const NormalForm& a, const NormalForm& b);
NormalForm inverse(const DefiningGraph& g, const NormalForm& nf);
/// Drops the leftmost diagonal generator of the first syllable.
NormalForm predecessor(const DefiningGraph& g, const NormalForm& nf);

std::string format_normal_form(const DefiningGraph& g, const NormalForm& nf);

}  // namespace subdivlab
