#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "subdivlab/special.hpp"

namespace subdivlab {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::filesystem::path input;
  std::string mode = "raag";  // "raag" or "special"
  int levels = 3;  // ball depth N; tilings cover levels 0..N-1
  std::size_t element_cap = 1'000'000;
  std::optional<double> time_limit_seconds;
  std::filesystem::path out_dir = "out";
  std::set<std::string> exports{"reports"};  // tilings, dot, svg, reports
  bool coalesce = false;
  int ends_window = 3;
  int cone_depth = 1;
  bool strict_cubes = false;
  std::uint64_t layout_seed = 1;
  bool use_cache = true;
};

enum ExitStatus : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitParse = 2,
  kExitCap = 3,
  kExitStarConvexity = 4,
};

/// Builds everything the config asks for, writes the requested artifacts into
/// out_dir and returns the process exit status. Messages go to `log`.
int run(const RunConfig& cfg, std::ostream& log);

/// The report of a completed run. Keys are sorted so equal inputs give
/// byte-identical text.
struct RunResult {
  nlohmann::json report;
  std::vector<Tiling> tilings;  // pruned in special mode
  SubdivisionRule rule;
  bool unstable = false;
};
RunResult compute(const RunConfig& cfg);

/// Per-level counts: level, tiles, non-ideal, ideal, then one column per type.
std::string counts_csv(const std::vector<Tiling>& tilings, const SubdivisionRule& rule);

nlohmann::json tiling_to_json(const Tiling& t);
Tiling tiling_from_json(const nlohmann::json& j);
nlohmann::json tilings_to_json(const std::vector<Tiling>& tilings, const DefiningGraph& g);
std::vector<Tiling> tilings_from_json(const nlohmann::json& j);
/// Equal after renumbering tiles: same tiles as (owner, component, ideal,
/// covered, cells, shape) records and the same edges between them.
bool tilings_isomorphic(const Tiling& a, const Tiling& b);

/// History graph in DOT: one cluster per level, horizontal edges solid for
/// flat ridges and dotted for containment, parent edges dashed grey.
std::string history_dot(const std::vector<Tiling>& tilings);

struct SvgOptions {
  std::uint64_t seed = 1;
  int iterations = 200;
  /// Children of this level's tiles drawn in a second row, joined to parents.
  const Tiling* next_level = nullptr;
};
/// Schematic force layout of one tiling. Node colour by type, ideal tiles
/// dashed, flat-ridge edges solid, containment edges dotted.
std::string tiling_svg(const Tiling& t, const SvgOptions& opts = {});

/// Writes through a temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace subdivlab
