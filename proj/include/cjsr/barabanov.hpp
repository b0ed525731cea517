#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cjsr/ipa.hpp"
#include "cjsr/system.hpp"

namespace cjsr {

// Reverses every edge and transposes its matrix. Applying it twice gives
// back the original system.
System dualize(const System& sys);

// Piecewise linear multinorm attaining the joint spectral radius: at
// vertex i the norm of x is the largest inner product with a stored
// generator or its negative. Generators come from the dual system's
// certificate, one group per vertex.
struct BarabanovMultinorm {
    double rho = 0.0;
    std::string kind = "dual_absco";
    std::vector<std::vector<Vec>> generators;
};

double multinorm_eval(const BarabanovMultinorm& mn, int vertex, const Vec& x);

struct BarabanovResult {
    JsrOutcome outcome;  // of the invariant polytope run on the dual
    std::optional<BarabanovMultinorm> multinorm;
};

BarabanovResult barabanov_multinorm(const System& sys, const AlgorithmOptions& opt = {},
                                    int l0 = 10);

// Largest violation of the defining identity on random unit probes: at
// every vertex, the maximum of the norms of the outgoing images on the
// system scaled by rho must equal the norm of the probe itself.
double verify_invariance(const System& sys, const BarabanovMultinorm& mn,
                         int samples_per_vertex = 32, std::uint64_t seed = 0);

}  // namespace cjsr
