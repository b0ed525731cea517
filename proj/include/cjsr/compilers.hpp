#pragma once

#include <utility>
#include <vector>

#include "cjsr/system.hpp"

namespace cjsr {

// One vertex per mode, named A1..Am. The edge from vertex i to vertex j
// carries the mode-j matrix and exists unless the ordered pair (j, i) is
// forbidden. Mode indices are 1-based.
System compile_markovian(const std::vector<Mat>& modes,
                         const std::vector<std::pair<int, int>>& forbidden);

// Vertices are the words of length l-1 over the modes that contain no
// forbidden word, where l is the longest forbidden word (at least 2).
// The leftmost letter is the most recent mode. The edge from beta to
// gamma = (c, beta_1, ..) exists when the l-letter word c.beta contains
// no forbidden word, and carries the mode-c matrix. An empty forbidden
// set compiles to the complete one-letter-memory graph.
System compile_forbidden_words(const std::vector<Mat>& modes,
                               const std::vector<std::vector<int>>& words);

}  // namespace cjsr
