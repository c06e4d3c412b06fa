#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "subdivlab/invariants.hpp"
#include "subdivlab/tiling.hpp"

namespace subdivlab {

/// A finite cube complex with edges labelled by signed RAAG generators.
/// Crossing edge e from `from` to `to` multiplies by label^sign.
struct CubeComplexSpec {
  struct Edge {
    int from = 0;
    int to = 0;
    int gen = 0;
    int sign = 1;
  };
  /// A corner of a declared 3-cube: three edge germs at one vertex.
  struct CubeCorner {
    int vertex = 0;
    std::array<Letter, 3> germs;
  };
  std::vector<std::string> vertices;
  std::vector<Edge> edges;
  std::vector<std::array<int, 4>> squares;  // edge ids around a 4-cycle
  std::vector<CubeCorner> cubes;
  std::optional<DefiningGraph> graph;  // when embedded in the file

  /// Accepts {"vertices", "edges": [{"from","to","label","sign"}], "squares",
  /// optional "cubes": [{"vertex", "germs": ["a+","b-","c+"]}], optional "graph"}.
  /// Labels are resolved against `g`, or the embedded graph when `g` is null.
  static CubeComplexSpec from_json_text(std::string_view text, const DefiningGraph* g = nullptr);
  static CubeComplexSpec load(const std::filesystem::path& path, const DefiningGraph* g = nullptr);
  std::string to_json_text(const DefiningGraph& g) const;
};

/// One vertex, one loop per generator, one square per edge of the graph.
CubeComplexSpec salvetti_spec(const DefiningGraph& g);

struct IsometryCheck {
  bool ok = true;
  std::string violation;
};

/// Link injectivity, fullness for commuting germ pairs, and commuting square
/// labels; `strict` also demands a declared cube for every commuting germ
/// triple whose pairs all span squares.
IsometryCheck check_local_isometry(const CubeComplexSpec& spec, const DefiningGraph& g,
                                   bool strict = false);

struct LiftSet {
  std::vector<char> lifted;  // indexed by ball element id
  std::vector<int> witness_vertex;  // a vertex of Y reaching each element, or -1
  std::vector<std::size_t> level_sizes;
  std::size_t states = 0;
  bool contains(ElemId id) const { return id >= 0 && lifted[id]; }
};

/// Breadth-first lift over (vertex, element) states inside B(N), starting at
/// vertex 0 over the identity.
LiftSet lift_basepoints(const CubeComplexSpec& spec, const Ball& ball, int levels,
                        std::size_t state_cap = 5'000'000);

class StarConvexityError : public std::runtime_error {
 public:
  StarConvexityError(const std::string& what, ElemId witness)
      : std::runtime_error(what), witness_(witness) {}
  ElemId witness() const { return witness_; }

 private:
  ElemId witness_;
};

/// Elements whose ball predecessor is not lifted.
std::vector<ElemId> star_convexity_violations(const LiftSet& lifts, const Ball& ball);

struct TypeEmbedding {
  int pruned_type = 0;
  int ambient_type = -1;  // -1 when the tiles disagree
  bool children_embed = false;
};

struct PrunedHistory {
  std::vector<Tiling> tilings;
  /// For every pruned tile, the index of the ambient tile it came from.
  std::vector<std::vector<int>> source;
  SubdivisionRule rule;
  std::vector<TypeEmbedding> embedding;
  bool embeds = false;
};

/// Keeps lifted tiles, turns the first non-lifted generation into ideal tiles
/// and drops everything below them; then re-runs refinement. Throws
/// StarConvexityError when a lifted element has an unlifted predecessor.
PrunedHistory prune_history(const Ball& ball, const std::vector<Tiling>& ambient,
                            const SubdivisionRule& ambient_rule, const LiftSet& lifts,
                            const RuleOptions& opts = {});

struct ConeTypeReport {
  int depth = 1;
  std::size_t classes = 0;
  /// Classes among the vertices of each classified level; entry 0 is the root.
  std::vector<std::size_t> per_level;
  bool approximate = true;
};

/// Bounded-depth cone types on the history graph with a virtual root above
/// level 0. A vertex's depth-j signature is its horizontal degree together with
/// the sorted depth-(j-1) signatures of its children.
ConeTypeReport cone_types(const HistoryGraph& h, int depth);

}  // namespace subdivlab
