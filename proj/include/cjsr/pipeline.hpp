#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "cjsr/ipa.hpp"
#include "cjsr/system.hpp"

namespace cjsr {

struct PipelineOptions {
    AlgorithmOptions algo;
    int l0 = 10;                               // closed walk search depth
    std::uint64_t seed = 12345;               // reducibility probe seed
    std::vector<std::string> candidate_edges; // manual walk override, empty = search
};

// Result of the composed analysis: split into strongly connected
// components, factor along any invariant family the iteration finds, run
// the polytope algorithm on each irreducible piece and take the largest
// value. `tree` records the decomposition for reports.
struct JsrSummary {
    double lower = 0.0;
    double upper = 0.0;
    bool certified = false;  // lower == upper, proven by certificates
    nlohmann::json tree;
    // Present when the whole input converged as a single irreducible block,
    // so the certificate lives in the input's own coordinates.
    std::optional<Converged> whole_certificate;
};

JsrSummary compute_jsr(const System& sys, const PipelineOptions& opt);

}  // namespace cjsr
