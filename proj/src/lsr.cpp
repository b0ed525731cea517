#include "cjsr/lsr.hpp"

#include <algorithm>
#include <cmath>

#include "cjsr/error.hpp"
#include "cjsr/smp.hpp"

namespace cjsr {

JsrOutcome run_lsr_polytope(const System& sys, const SmpCandidate& cand,
                            const AlgorithmOptions& opt) {
    if (!sys.nonnegative())
        throw Error("lower spectral radius iteration needs nonnegative edge matrices");
    return run_polytope_engine(sys, cand, opt, BodyKind::co_plus);
}

StabilizabilityReport stabilizability_verdict(const System& sys,
                                              const std::optional<SmpCandidate>& cand,
                                              const JsrOutcome* out, int l0) {
    StabilizabilityReport rep;
    if (!cand) {
        auto bf = brute_force_min_bounds(sys, std::min(l0, 6));
        rep.verdict = "unknown";
        rep.lower = bf.lower;
        rep.upper = bf.upper;
        rep.note = "no closed walks to seed a candidate";
        return rep;
    }
    if (const auto* c = std::get_if<Converged>(out)) {
        rep.lower = rep.upper = c->rho;
        rep.verdict = c->rho < 1.0 ? "stabilizable" : "not_stabilizable";
        rep.note = "certified";
        return rep;
    }
    if (const auto* b = std::get_if<Bracket>(out)) {
        rep.lower = b->lower;
        rep.upper = b->upper;
        rep.note = "bracket only";
    } else if (const auto* r = std::get_if<Rejected>(out)) {
        rep.lower = 0.0;
        rep.upper = cand->averaged_value;  // attained by the candidate walk
        rep.note = std::string("candidate rejected: ") + reject_reason_name(r->reason);
    } else {
        rep.lower = 0.0;
        rep.upper = cand->averaged_value;
        rep.note = "iteration stopped on an invariant family";
    }
    if (rep.upper < 1.0)
        rep.verdict = "stabilizable";
    else if (rep.lower > 1.0)
        rep.verdict = "not_stabilizable";
    else
        rep.verdict = "unknown";
    return rep;
}

StabilizabilityReport is_stabilizable(const System& sys, const AlgorithmOptions& opt, int l0) {
    if (!sys.nonnegative()) throw Error("is_stabilizable needs nonnegative edge matrices");
    auto cand = find_candidate_smp_min(sys, l0);
    if (!cand) return stabilizability_verdict(sys, cand, nullptr, l0);
    JsrOutcome out = run_lsr_polytope(sys, *cand, opt);
    return stabilizability_verdict(sys, cand, &out, l0);
}

}  // namespace cjsr
