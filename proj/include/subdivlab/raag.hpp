#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace subdivlab {

using GenMask = std::uint32_t;

/// Maximum number of generators a defining graph may carry.
inline constexpr int kMaxGenerators = 24;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The defining graph of a right-angled Artin group: generators in a fixed
/// order and the set of commuting pairs.
class DefiningGraph {
 public:
  DefiningGraph() = default;
  DefiningGraph(std::vector<std::string> generators,
                const std::vector<std::pair<std::string, std::string>>& edges);

  static DefiningGraph complete(int d);
  static DefiningGraph edgeless(int d);
  static DefiningGraph from_json_text(std::string_view text);
  static DefiningGraph load(const std::filesystem::path& path);

  int size() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& generators() const { return names_; }
  const std::string& name(int gen) const { return names_.at(gen); }
  std::optional<int> index_of(std::string_view name) const;

  bool adjacent(int a, int b) const { return (adj_[a] >> b) & 1U; }
  GenMask neighbors(int gen) const { return adj_[gen]; }
  GenMask all_mask() const { return size() == 32 ? ~GenMask{0} : (GenMask{1} << size()) - 1; }
  /// True iff every pair of generators in `mask` commutes. The empty set is a clique.
  bool is_clique(GenMask mask) const;
  bool is_connected() const;
  std::size_t edge_count() const;
  std::vector<std::pair<int, int>> edges() const;

  /// Same generators and edges, with adjacency taken from the sub-mask.
  DefiningGraph induced(GenMask mask) const;

  std::string to_json_text() const;
  /// Stable 64-bit FNV-1a digest of the canonical JSON form.
  std::uint64_t hash() const;
  std::string hash_hex() const;

  /// All adjacency-preserving permutations of the generators (brute force, d <= 8).
  std::vector<std::vector<int>> automorphisms() const;

  friend bool operator==(const DefiningGraph& a, const DefiningGraph& b) {
    return a.names_ == b.names_ && a.adj_ == b.adj_;
  }

 private:
  std::vector<std::string> names_;
  std::vector<GenMask> adj_;
};

/// Assignment of a sign in {-1, 0, +1} to each generator.
struct SignedSet {
  GenMask pos = 0;
  GenMask neg = 0;

  GenMask support() const { return pos | neg; }
  int size() const;
  bool empty() const { return support() == 0; }
  int sign(int gen) const {
    if ((pos >> gen) & 1U) return 1;
    if ((neg >> gen) & 1U) return -1;
    return 0;
  }
  SignedSet inverse() const { return {neg, pos}; }
  /// Flip the sign of every generator in `mask`.
  SignedSet flipped(GenMask mask) const {
    return {(pos & ~mask) | (neg & mask), (neg & ~mask) | (pos & mask)};
  }
  SignedSet restricted(GenMask mask) const { return {pos & mask, neg & mask}; }
  /// True iff `this` assigns the same sign as `other` on all of its support.
  bool is_sub_of(const SignedSet& other) const {
    return (pos & ~other.pos) == 0 && (neg & ~other.neg) == 0;
  }
  std::uint64_t key() const { return (std::uint64_t{pos} << 32) | neg; }

  static SignedSet single(int gen, int sign) {
    SignedSet s;
    (sign > 0 ? s.pos : s.neg) = GenMask{1} << gen;
    return s;
  }

  friend bool operator==(const SignedSet&, const SignedSet&) = default;
  friend auto operator<=>(const SignedSet&, const SignedSet&) = default;
};

/// Every non-empty signed subset of `s` (same signs), in increasing mask order.
std::vector<SignedSet> nonempty_sub_signed_sets(const SignedSet& s);

/// Human-readable form such as "(a:+,b:-)".
std::string format_signed_set(const DefiningGraph& g, const SignedSet& s);
/// Word-like form of a diagonal generator, e.g. "a b^-1 c".
std::string format_diagonal(const DefiningGraph& g, const SignedSet& s);
SignedSet parse_signed_set(const DefiningGraph& g, std::string_view text);

/// A cell of the boundary of the cube [-1,1]^d: coordinates x_i = v_i wherever
/// v_i is nonzero. Codimension is the support size.
struct CubeCell {
  SignedSet v;
  int codim() const { return v.size(); }
  friend bool operator==(const CubeCell&, const CubeCell&) = default;
  friend auto operator<=>(const CubeCell&, const CubeCell&) = default;
};

bool is_spherical(const DefiningGraph& g, const SignedSet& s);

std::vector<GenMask> enumerate_cliques(const DefiningGraph& g);
/// All spherical signed sets with nonempty support, grouped by clique in
/// canonical clique order.
std::vector<SignedSet> diagonal_elements(const DefiningGraph& g);
bool cell_is_ideal(const DefiningGraph& g, const CubeCell& c);
/// Closed-cell intersection in the untruncated cube.
bool cells_intersect(const CubeCell& v, const CubeCell& w);
/// Closed-cell intersection in the truncated fundamental domain: two
/// non-ideal cells meet only if their union is itself non-ideal.
bool cells_meet_truncated(const DefiningGraph& g, const CubeCell& v, const CubeCell& w);
/// Ideal cells whose support is a minimal non-clique; these become the
/// ideal facets of the truncated domain.
std::vector<SignedSet> ideal_facets(const DefiningGraph& g);

/// Canonical comparison of generator subsets: by size, then lexicographic on
/// the sorted generator indices.
bool clique_less(GenMask a, GenMask b);
std::string format_mask(const DefiningGraph& g, GenMask mask);

}  // namespace subdivlab
