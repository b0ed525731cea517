#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cjsr/polytope.hpp"
#include "cjsr/reducibility.hpp"
#include "cjsr/smp.hpp"
#include "cjsr/system.hpp"

namespace cjsr {

struct AlgorithmOptions {
    double tol = 1e-10;
    int max_iter = 40;
    bool cone_mode = false;      // nonnegative variant: convex hulls of {v, 0}
    double duplicate_eps = 1e-12;
    double rank_tol = 1e-9;
};

// One certified polytope vertex with its construction history.
struct CertVertex {
    Vec coords;
    int seed = -1;               // which initial eigenvector walk produced it
    std::vector<int> gen_edges;  // edge indices applied after the seed, in order
    bool flagged = false;        // membership value fell in the (1-tol, 1+tol] band
};

struct Certificate {
    BodyKind kind = BodyKind::absco;
    std::vector<std::vector<CertVertex>> vertices;  // grouped per graph vertex
};

struct Converged {
    double rho = 0.0;
    Certificate certificate;
    int iterations = 0;          // rounds that added at least one vertex
    SmpCandidate smp;
};

struct Bracket {
    double lower = 0.0;
    double upper = 0.0;
    SmpCandidate smp;
};

struct ReducibilityWitness {
    SubspaceFamily family;
    SmpCandidate smp;
};

enum class RejectReason { complex_leading, multiple_leading, tie, degenerate_perron };

const char* reject_reason_name(RejectReason r);

struct Rejected {
    RejectReason reason;
    std::string detail;
};

using JsrOutcome = std::variant<Converged, Bracket, ReducibilityWitness, Rejected>;

// Divides every edge matrix by the candidate's averaged value.
System scale_system(const System& sys, double candidate_value);

// Polytope iteration state, exposed for inspection and tests.
struct PolytopeState {
    BodyKind kind = BodyKind::absco;
    std::vector<std::vector<CertVertex>> verts;  // per graph vertex
    std::vector<VertexSet> bodies;               // mirrors verts[i].coords
    std::vector<std::pair<int, int>> frontier;   // (graph vertex, index into verts)
    std::vector<Mat> span;                       // orthonormal basis per vertex
    int rounds_with_additions = 0;
    int passes = 0;
};

// Seeds the polytopes with the cycle's leading eigenvector walk on the
// scaled system. Throws on a cycle whose walk fails to reproduce the
// start vector; returns nullopt when the seed is unusable in cone mode
// (a Perron vector with a zero component).
std::optional<PolytopeState> seed_eigenvectors(const System& scaled, const SmpCandidate& cand,
                                               const AlgorithmOptions& opt, BodyKind kind,
                                               std::string* why = nullptr);

// Core fixed point loop, shared by the maximal and minimal variants.
JsrOutcome run_polytope_engine(const System& sys, const SmpCandidate& cand,
                               const AlgorithmOptions& opt, BodyKind kind);

// Joint spectral radius via invariant polytopes. Precondition: strongly
// connected graph (use strongly_connected_components first otherwise).
JsrOutcome run_invariant_polytope(const System& sys, const SmpCandidate& cand,
                                  const AlgorithmOptions& opt = {});

// Ratio of the best competing cycle to the candidate, over closed walks of
// length at most l0. Below 1 means the candidate dominates the enumeration.
double check_dominance(const System& sys, const SmpCandidate& cand, int l0,
                       Path* achieving = nullptr);

// Independent check of a convergence certificate: the maximum membership
// value of any mapped polytope vertex, on the system rescaled by rho.
// At most 1 + tol for a valid certificate.
double verify_certificate(const System& sys, const Converged& res);

}  // namespace cjsr
