#pragma once

#include <cstdint>
#include <optional>

#include "cjsr/graph.hpp"
#include "cjsr/system.hpp"

namespace cjsr {

enum class LeadingClass { real_simple, real_multiple, complex_pair };

const char* leading_class_name(LeadingClass c);

struct SmpCandidate {
    Path cycle;
    double averaged_value = 0.0;  // rho(product)^(1/length)
    LeadingClass leading_class = LeadingClass::real_simple;
    bool tie = false;  // a distinct cycle matches within rel. 1e-10
    // Runner-up over the same enumeration, for the dominance diagnostic.
    double second_value = 0.0;
    std::optional<Path> second_cycle;
};

// Classifies the leading eigenvalue of a square matrix: relative modulus
// gap below 1e-8 means the top modulus is attained more than once.
LeadingClass classify_leading(const Mat& m);

// Best closed walk by averaged spectral radius, ties broken by shorter
// length then canonical rotation order. Empty result on acyclic graphs.
std::optional<SmpCandidate> find_candidate_smp(const System& sys, int l0,
                                               std::uint64_t cap = 1000000ull);

std::optional<SmpCandidate> find_candidate_smp_min(const System& sys, int l0,
                                                   std::uint64_t cap = 1000000ull);

// Candidate forced to a caller-chosen closed walk instead of the search
// winner; the runner-up is still computed by enumeration.
SmpCandidate candidate_from_cycle(const System& sys, const Path& cycle, int l0,
                                  bool maximize = true,
                                  std::uint64_t cap = 1000000ull);

}  // namespace cjsr
