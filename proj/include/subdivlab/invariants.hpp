#pragma once

#include <optional>
#include <string>
#include <vector>

#include "subdivlab/tiling.hpp"

namespace subdivlab {

/// Raised when the data cannot support the requested fit.
class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GrowthReport {
  std::vector<std::size_t> totals;  // non-ideal tiles per level
  std::vector<std::vector<std::size_t>> by_type;  // [level][type]
  std::vector<std::vector<long long>> transition;  // non-ideal types only
  std::vector<int> transition_types;
  /// Minimal linear recurrence of the totals as exact rationals "p/q":
  /// totals[n] = sum_i coeff[i] * totals[n-1-i]. Empty when underdetermined.
  std::vector<std::string> recurrence;
  std::string method;  // "transition-matrix" or "recurrence"
  bool exponential = false;
  double ratio = 1.0;  // spectral radius when exponential
  int degree = 0;  // polynomial degree of the sphere counts otherwise
  std::string classification() const;
};

/// Uses the rule's transition matrix when the rule is stable, otherwise an
/// exact Berlekamp-Massey fit of the totals (needs at least 4 levels).
GrowthReport growth(const std::vector<Tiling>& tilings, const SubdivisionRule& rule);
/// Exact minimal recurrence over the rationals; throws FitError when the
/// sequence is too short to determine it.
std::vector<std::string> minimal_recurrence(const std::vector<long long>& seq);
double spectral_radius(const std::vector<std::vector<long long>>& m);
/// Exact test that a nonnegative integer matrix has spectral radius above 1.
bool exceeds_one(const std::vector<std::vector<long long>>& m);

struct EndsVerdict {
  enum class Kind { Count, Unbounded, Undetermined } kind = Kind::Undetermined;
  std::size_t value = 0;  // the count, or the last count when unbounded
  std::string to_string() const;
};

struct EndsReport {
  std::vector<std::size_t> components;  // per level
  /// Per level > 0: component of each component's parents one level up.
  std::vector<std::vector<int>> parent_component;
  std::vector<char> bijective;  // per level > 0
  int window = 3;
  EndsVerdict verdict;
};

/// Components of the non-ideal adjacency graph of each tiling.
std::vector<int> tile_components(const Tiling& t, std::size_t* count = nullptr);
EndsReport ends(const std::vector<Tiling>& tilings, int window = 3);

struct MeshReport {
  bool certified = false;
  /// Nodes of the persistence digraph: "single T" for a tile type with a
  /// single non-ideal child, "pair T U kind" for an adjacent type pair.
  std::vector<std::string> nodes;
  std::vector<std::pair<int, int>> arcs;
  std::vector<std::string> orbit;  // the cycle, when not certified
  /// Concrete tiles realizing the first orbit node: level and tile indices.
  int witness_level = -1;
  std::vector<int> witness_tiles;
};

/// Throws std::invalid_argument for an unstable rule.
MeshReport mesh_certificate(const std::vector<Tiling>& tilings, const SubdivisionRule& rule);

struct LevelDiameter {
  int level = 0;
  std::size_t tiles = 0;
  bool finite = true;
  bool bound_only = false;  // double-sweep lower bound
  int diameter = 0;
  int from = -1, to = -1;  // witness pair
  std::vector<int> path;  // tile indices from `from` to `to`
};

struct DivergenceReport {
  std::vector<LevelDiameter> levels;
  double linear_slope = 0, linear_intercept = 0, linear_sse = 0;
  double exp_rate = 0, exp_scale = 0, exp_sse = 0;
  std::size_t fitted_points = 0;
  std::string fit;  // "linear", "exponential", "undetermined" or "infinite"
};

struct DivergenceOptions {
  /// Levels with more non-ideal tiles use the double-sweep lower bound.
  std::size_t exact_limit = 20000;
};

DivergenceReport divergence_diameter(const std::vector<Tiling>& tilings,
                                     const DivergenceOptions& opts = {});
/// Re-checks a witness: consecutive tiles adjacent, endpoints match, length equals diameter.
bool verify_witness(const Tiling& t, const LevelDiameter& d);

}  // namespace subdivlab
