#pragma once

#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "subdivlab/ball.hpp"

namespace subdivlab {

enum class EdgeKind { FlatRidge, Containment };
const char* to_string(EdgeKind k);

/// One tile of the level-n tiling: a component of the visible region of an
/// element at level n+1, or a persistent ideal component.
struct Tile {
  int level = 0;
  ElemId owner = kOutside;
  int component = 0;
  bool ideal = false;
  /// The convex cell of the previous sphere this tile sits over (the ball
  /// predecessor move of the owner). Empty for ideal tiles.
  SignedSet covered;
  std::vector<CubeCell> cells;
  std::vector<int> shape;
  int parent = -1;  // index into the previous level's tiles
  std::vector<int> children;  // indices into the next level's tiles
  int type = -1;  // assigned by extract_rule

  GenMask clique() const { return covered.support(); }
};

struct TileEdge {
  int a = 0;
  int b = 0;  // a < b
  EdgeKind kind = EdgeKind::FlatRidge;
  friend bool operator==(const TileEdge&, const TileEdge&) = default;
};

/// Tiles of one level. Non-ideal tiles come first, ordered by (owner,
/// component); ideal tiles follow, persisted ones before new ones.
struct Tiling {
  int level = 0;
  std::vector<Tile> tiles;
  std::vector<TileEdge> edges;

  std::size_t nonideal_count() const;
  std::size_t ideal_count() const { return tiles.size() - nonideal_count(); }
  std::vector<std::vector<int>> adjacency() const;
};

/// Tilings of levels 0..max_level; needs a ball of depth max_level + 1.
std::vector<Tiling> build_tilings(const Ball& ball, int max_level);
Tiling build_tiling(const Ball& ball, int n);

struct HistoryGraph {
  struct Vertex {
    int level;
    int tile;
  };
  std::vector<Vertex> vertices;  // non-ideal tiles, level by level
  std::vector<std::pair<int, int>> horizontal;
  std::vector<std::pair<int, int>> vertical;  // (parent, child)
  std::vector<int> level_offset;  // first vertex of each level
};

HistoryGraph build_history(const std::vector<Tiling>& tilings);

struct RuleOptions {
  /// Merge clique labels lying in one orbit of the graph's automorphism group.
  bool coalesce = false;
};

struct TileType {
  int id = 0;
  bool ideal = false;
  GenMask clique = 0;  // representative clique (orbit minimum when coalesced)
  std::vector<int> shape;
  std::map<int, int> children;  // child type -> multiplicity, ideal types included
  int ideal_children = 0;
  /// Adjacency among the children of one tile: (type, type, kind) -> count.
  std::map<std::tuple<int, int, int>, int> internal_edges;
  std::vector<std::size_t> count_by_level;
};

struct SubdivisionRule {
  std::vector<TileType> types;
  bool stable = false;
  int rounds = 0;  // refinement rounds until stability
  /// Deepest tiling level at which every tile carries a type.
  int typed_levels = 0;
  /// Distinct region shapes among level-0 non-ideal tiles.
  std::size_t level0_shape_classes = 0;
  /// Distinct uncoalesced (clique, shape) labels over all typed tiles.
  std::size_t raw_clique_classes = 0;
  bool replay_ok = false;
  std::vector<std::string> replay_errors;

  /// Non-ideal transition matrix: entry (i, j) = children of type j per tile of type i.
  std::vector<std::vector<long long>> transition() const;
  std::vector<int> nonideal_types() const;
};

/// Partition refinement: start from (clique, shape) labels and split by child
/// labels and internal child adjacency until nothing splits. Writes the final
/// type of each tile into the tilings.
SubdivisionRule extract_rule(std::vector<Tiling>& tilings, const DefiningGraph& g,
                             const RuleOptions& opts = {});

/// Cells of the inflated cube boundary.
struct InflationComplex {
  std::vector<SignedSet> facets;  // non-ideal cells then ideal facets
  std::size_t nonideal_facets = 0;
  std::vector<std::pair<int, int>> ridges;  // (smaller cell, larger cell) indices
};
InflationComplex inflation(const DefiningGraph& g);

/// Children predicted for a tile over the signed clique sigma: candidate cells
/// outside the closed star of the gluing facets, and those that survive.
struct StarComplement {
  std::vector<SignedSet> candidates;
  std::vector<SignedSet> surviving;
};
StarComplement star_complement(const DefiningGraph& g, const SignedSet& sigma);

struct DescriptorCheck {
  std::size_t tiles_checked = 0;
  std::size_t mismatches = 0;
  std::vector<std::string> examples;
};
/// Compares each tile's actual child cells with the predicted surviving set.
DescriptorCheck check_descriptor(const Ball& ball, const std::vector<Tiling>& tilings);

}  // namespace subdivlab
