#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cjsr/system.hpp"

namespace cjsr {

// One subspace per vertex, held as a matrix with orthonormal columns
// (dim_i x r_i, r_i possibly 0). Invariant family: every edge maps the
// source subspace into the target subspace.
struct SubspaceFamily {
    std::vector<Mat> bases;
};

bool family_is_strict(const System& sys, const SubspaceFamily& fam);

// Max over edges of the part of the mapped subspace that escapes the
// target subspace, relative to the operator size.
double family_residual(const System& sys, const SubspaceFamily& fam);

// Smallest invariant family containing x at the given vertex: closes the
// single vector under all edge maps, growing per-vertex orthonormal bases.
SubspaceFamily orbit_span(const System& sys, int vertex, const Vec& x, double rank_tol = 1e-9);

struct FamilySearchOptions {
    int random_trials = -1;  // negative: 20 * total dimension
    std::uint64_t seed = 12345;
    double rank_tol = 1e-9;
    int cycle_len = 6;  // eigenvector probes from cycles up to this length
};

// Looks for a strict invariant family by probing orbit spans of basis
// vectors, real eigenvectors of short cycle products, and random vectors.
// Deterministic: fixed probe order, first strict family wins.
std::optional<SubspaceFamily> find_invariant_family(const System& sys,
                                                    const FamilySearchOptions& opt = {});

struct Factorization {
    SubspaceFamily family;            // orthonormalized input family
    System restriction;               // dynamics inside the family
    System quotient;                  // dynamics on orthogonal complements
    std::vector<int> restriction_map; // child vertex -> parent vertex
    std::vector<int> quotient_map;
    std::vector<Mat> coupling;        // per parent edge: block linking the parts
};

// Splits the system along an invariant family. Vertices whose part is
// zero-dimensional are dropped from the corresponding child.
Factorization factorize(const System& sys, const SubspaceFamily& fam, double residual_tol = 1e-9);

// Fully reduces: recursively factors until no strict family is found.
std::vector<System> irreducible_blocks(const System& sys, const FamilySearchOptions& opt = {});

}  // namespace cjsr
