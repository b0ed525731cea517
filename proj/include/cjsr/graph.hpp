#pragma once

#include <cstdint>
#include <vector>

#include "cjsr/system.hpp"

namespace cjsr {

// Components are listed so that every cross edge goes from an earlier
// component to a later one; closed walks never leave a component.
struct SccDecomposition {
    std::vector<std::vector<int>> components;  // vertex indices of sys
    std::vector<System> subsystems;            // induced, internal edges only
};

SccDecomposition strongly_connected_components(const System& sys);

bool is_strongly_connected(const System& sys);

// All primitive closed walks of length <= l0, one per rotation class.
// The representative is the rotation whose edge-id sequence is
// lexicographically smallest; walks that are powers of shorter closed
// walks are excluded.
std::vector<Path> enumerate_closed_walks(const System& sys, int l0,
                                         std::uint64_t cap = 1000000ull);

// Repeatedly merges vertex pairs with equal dimension and identical
// outgoing structure (same multiset of target/matrix pairs, entrywise
// within eps under the identity pairing), rerouting incoming edges.
System identify_vertices(const System& sys, double eps = 1e-12);

}  // namespace cjsr
