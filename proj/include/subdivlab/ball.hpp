#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "subdivlab/raag.hpp"
#include "subdivlab/word.hpp"

namespace subdivlab {

using ElemId = std::int32_t;
inline constexpr ElemId kOutside = -1;

class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BallOptions {
  std::size_t element_cap = 1'000'000;
  std::optional<std::chrono::steady_clock::time_point> deadline;
  /// Directory for per-level caches; empty disables caching.
  std::filesystem::path cache_dir;
};

/// Breadth-first layers of a RAAG under the diagonal generating set.
///
/// Element ids are assigned level by level, each level sorted in canonical
/// normal-form order, so id order is the (level, normal form) order.
class Ball {
 public:
  const DefiningGraph& graph() const { return graph_; }
  int depth() const { return static_cast<int>(levels_.size()) - 1; }
  std::size_t size() const { return elems_.size(); }

  const std::vector<SignedSet>& moves() const { return moves_; }
  std::optional<int> move_index(const SignedSet& s) const;

  const std::vector<ElemId>& level_elements(int n) const { return levels_.at(n); }
  std::vector<std::size_t> level_sizes() const;
  const NormalForm& element(ElemId id) const { return elems_.at(id); }
  int level(ElemId id) const { return level_of_.at(id); }
  std::optional<ElemId> find(const NormalForm& nf) const;
  /// Level of an element, or -1 when it lies outside the built ball.
  int level_of(const NormalForm& nf) const;
  bool in_ball(ElemId id, int n) const { return id != kOutside && level_of_[id] <= n; }

  /// g * t for a move index, or kOutside when the product is not in the ball.
  ElemId neighbor(ElemId g, int move) const { return neighbors_[g * moves_.size() + move]; }
  ElemId neighbor(ElemId g, const SignedSet& t) const;

  ElemId predecessor(ElemId id) const { return pred_.at(id); }
  /// Move index m with predecessor(id) * moves()[m] == id.
  int predecessor_move(ElemId id) const { return pred_move_.at(id); }
  /// Number of level-(n-1) neighbours g covers through a convex cell.
  int cover_count(ElemId id) const { return cover_count_.at(id); }

  friend Ball build_ball(const DefiningGraph& g, int levels, const BallOptions& opts);

 private:
  void assign_predecessors(int from_level);
  void fill_neighbors(ElemId from, ElemId to);
  void add_level(std::vector<NormalForm> level);

  DefiningGraph graph_;
  std::vector<SignedSet> moves_;
  std::unordered_map<std::uint64_t, int> move_index_;
  std::vector<std::vector<ElemId>> levels_;
  std::vector<NormalForm> elems_;
  std::vector<int> level_of_;
  std::unordered_map<std::vector<std::int32_t>, ElemId, KeyHash> index_;
  std::vector<ElemId> neighbors_;
  std::vector<ElemId> pred_;
  std::vector<int> pred_move_;
  std::vector<int> cover_count_;
};

/// Builds levels 0..levels. Predecessors are chosen among previous-level
/// neighbours p for which the cell (p, p^-1 g) is convex in B(level - 1),
/// falling back to all previous-level neighbours; ties go to the canonical
/// minimum.
Ball build_ball(const DefiningGraph& g, int levels, const BallOptions& opts = {});

/// A cell of the universal cover: the cube cell `cell` of the domain `owner`.
struct BoundaryCell {
  ElemId owner = 0;
  CubeCell cell;
  friend bool operator==(const BoundaryCell&, const BoundaryCell&) = default;
  friend auto operator<=>(const BoundaryCell&, const BoundaryCell&) = default;
};

/// Domains containing the cell: owner * t_S over signed subsets S (including
/// the empty one) with spherical support. Entries may be kOutside.
std::vector<ElemId> domain_set(const Ball& ball, const BoundaryCell& c);
/// The (level, normal form)-minimal member of the domain set with the sign
/// vector induced in that domain.
BoundaryCell canonical(const Ball& ball, const BoundaryCell& c);

enum class CellClass { Interior, Convex, Flat, Concave, Covered, Ideal };
const char* to_string(CellClass c);

struct CellClassification {
  CellClass kind;
  int members_in_ball;
};

CellClassification classify_cell(const Ball& ball, int n, const BoundaryCell& c);
/// Non-ideal cells meeting B(n) in exactly one domain, canonical and sorted.
std::vector<BoundaryCell> convex_cells(const Ball& ball, int n);

struct RegionComponent {
  std::vector<CubeCell> cells;  // sorted; includes ideal facets
  bool has_nonideal = false;
  /// Non-ideal cell counts by codimension (index 0 = codimension 1), then
  /// the ideal facet count.
  std::vector<int> shape;
};

/// The part of domain g lying on the sphere S(n): its convex non-ideal
/// cells and its ideal facets, split into closed-intersection components.
std::vector<RegionComponent> visible_region(const Ball& ball, int n, ElemId g);

/// Star-convexity probe: number of elements whose word-engine predecessor
/// does not lie one level lower.
struct PredecessorAudit {
  std::size_t checked = 0;
  std::size_t mismatches = 0;
  std::vector<ElemId> examples;
};
PredecessorAudit audit_predecessors(const Ball& ball);

/// Level cache: one text file per (graph hash, level) with sorted normal forms.
std::filesystem::path level_cache_path(const std::filesystem::path& dir,
                                       const DefiningGraph& g, int level);

}  // namespace subdivlab
