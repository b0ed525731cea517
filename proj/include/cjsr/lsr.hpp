#pragma once

#include <optional>
#include <string>

#include "cjsr/ipa.hpp"
#include "cjsr/smp.hpp"
#include "cjsr/system.hpp"

namespace cjsr {

// Lower spectral radius of a nonnegative system via the minimal variant of
// the polytope iteration: bodies extend upward from their vertices and a
// new image is kept while its antinorm stays at most 1 + tol.
JsrOutcome run_lsr_polytope(const System& sys, const SmpCandidate& cand,
                            const AlgorithmOptions& opt = {});

struct StabilizabilityReport {
    std::string verdict;  // stabilizable | not_stabilizable | unknown
    double lower = 0.0;
    double upper = 0.0;
    std::string note;
};

// Verdict from an already computed outcome; pass no candidate for systems
// without closed walks and the bounds fall back to short product scans.
StabilizabilityReport stabilizability_verdict(const System& sys,
                                              const std::optional<SmpCandidate>& cand,
                                              const JsrOutcome* out, int l0);

// Decides whether some switching sequence drives the state to zero, by
// certifying or bracketing the lower spectral radius against 1.
StabilizabilityReport is_stabilizable(const System& sys, const AlgorithmOptions& opt = {},
                                      int l0 = 10);

}  // namespace cjsr
