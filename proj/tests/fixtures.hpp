#pragma once

#include "subdivlab/raag.hpp"

namespace fixtures {

inline subdivlab::DefiningGraph triangle() { return subdivlab::DefiningGraph::complete(3); }
inline subdivlab::DefiningGraph free3() { return subdivlab::DefiningGraph::edgeless(3); }
inline subdivlab::DefiningGraph integers() { return subdivlab::DefiningGraph::complete(1); }
// a - z - b: F2 x Z with z central.
inline subdivlab::DefiningGraph path_azb() {
  return subdivlab::DefiningGraph({"a", "z", "b"}, {{"a", "z"}, {"z", "b"}});
}
// An edge plus an isolated vertex: Z * Z^2.
inline subdivlab::DefiningGraph edge_plus_point() {
  return subdivlab::DefiningGraph({"a", "b", "c"}, {{"a", "b"}});
}

}  // namespace fixtures
