#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subdivlab/raag.hpp"

namespace subdivlab::oracle {

// Brute-force enumerations that share no code with the word engine or the
// ball builder. Used to cross-check both.

/// Sphere sizes of Z^d under the L-infinity metric, by point enumeration.
std::vector<std::uint64_t> lattice_sphere_sizes(int d, int levels);
/// Sphere sizes of the free group F_k under the word metric, by counting
/// reduced words letter by letter.
std::vector<std::uint64_t> free_sphere_sizes(int k, int levels);
/// Sphere sizes of F_2 x Z under the diagonal metric, by breadth-first search
/// over (reduced free word, integer) pairs.
std::vector<std::uint64_t> f2z_sphere_sizes(int levels);

/// Elements are encoded as signed letters: +(gen+1) or -(gen+1).
using TraceWord = std::vector<int>;

/// Cancels inverse pairs separated only by commuting letters, repeatedly,
/// then returns the lexicographically least word in the commutation class.
TraceWord trace_normal_form(const DefiningGraph& g, TraceWord w);
/// Breadth-first search over trace normal forms with all diagonal moves.
std::vector<std::uint64_t> trace_sphere_sizes(const DefiningGraph& g, int levels,
                                              std::size_t cap = 2'000'000);
/// Word equality by exhaustive rewriting. Collects every word reachable by
/// swapping adjacent commuting letters or deleting adjacent inverse pairs and
/// compares the shortest reachable words of both sides.
bool rewriting_equal(const DefiningGraph& g, const TraceWord& u, const TraceWord& v);
/// Least shortest word reachable by the same rewriting; equal keys mean equal
/// elements.
TraceWord rewriting_key(const DefiningGraph& g, const TraceWord& w);

/// Family-appropriate oracle: lattice for complete graphs, reduced words for
/// edgeless graphs, generic trace search otherwise.
std::vector<std::uint64_t> sphere_sizes(const DefiningGraph& g, int levels);

}  // namespace subdivlab::oracle
