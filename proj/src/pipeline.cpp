#include "cjsr/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "cjsr/error.hpp"
#include "cjsr/graph.hpp"
#include "cjsr/reducibility.hpp"
#include "cjsr/smp.hpp"

namespace cjsr {

namespace {

using nlohmann::json;

struct PartResult {
    double lower = 0.0;
    double upper = 0.0;
    bool certified = true;
    json node;
    std::optional<Converged> converged;  // set when this part is one converged block
};

json smp_json(const System& sys, const SmpCandidate& cand) {
    json j;
    j["edges"] = path_edge_ids(sys, cand.cycle);
    j["value"] = cand.averaged_value;
    j["leading_class"] = leading_class_name(cand.leading_class);
    return j;
}

PartResult analyze_system(const System& sys, const PipelineOptions& opt, int depth);

double safe_upper(const System& sys, int l0) {
    for (int k = std::min(l0, 6); k >= 1; --k) {
        try {
            return brute_force_bounds(sys, k).upper;
        } catch (const CapError&) {
        }
    }
    double g = 0.0;
    for (const auto& e : sys.edges) g = std::max(g, operator_norm(e.m));
    return g;
}

// One strongly connected piece.
PartResult analyze_component(const System& sys, const PipelineOptions& opt, int depth) {
    PartResult res;
    if (sys.edge_count() == 0) {
        res.node = {{"type", "leaf"}, {"outcome", "no_cycles"}, {"rho", 0.0}};
        return res;
    }
    std::optional<SmpCandidate> cand;
    int l0 = opt.l0;
    for (;;) {
        try {
            cand = find_candidate_smp(sys, l0);
            break;
        } catch (const CapError&) {
            if (l0 <= 1) throw;
            l0 = std::max(1, l0 / 2);
        }
    }
    if (!cand) {
        res.node = {{"type", "leaf"}, {"outcome", "no_cycles"}, {"rho", 0.0}};
        return res;
    }

    JsrOutcome out = run_invariant_polytope(sys, *cand, opt.algo);
    if (const auto* c = std::get_if<Converged>(&out)) {
        double qhat = check_dominance(sys, *cand, l0);
        res.lower = res.upper = c->rho;
        res.certified = true;
        std::vector<int> sizes;
        for (const auto& group : c->certificate.vertices)
            sizes.push_back(static_cast<int>(group.size()));
        res.node = {{"type", "leaf"},         {"outcome", "converged"},
                    {"rho", c->rho},          {"iterations", c->iterations},
                    {"dominance", qhat},      {"smp", smp_json(sys, *cand)},
                    {"polytope_sizes", sizes}};
        res.converged = *c;
        return res;
    }
    if (const auto* b = std::get_if<Bracket>(&out)) {
        res.lower = b->lower;
        res.upper = b->upper;
        res.certified = false;
        res.node = {{"type", "leaf"},
                    {"outcome", "bracket"},
                    {"lower", b->lower},
                    {"upper", b->upper},
                    {"smp", smp_json(sys, *cand)}};
        return res;
    }
    if (const auto* r = std::get_if<Rejected>(&out)) {
        res.lower = cand->averaged_value;
        res.upper = std::max(safe_upper(sys, l0), res.lower);
        res.certified = false;
        res.node = {{"type", "leaf"},
                    {"outcome", "rejected"},
                    {"reason", reject_reason_name(r->reason)},
                    {"detail", r->detail},
                    {"lower", res.lower},
                    {"upper", res.upper},
                    {"smp", smp_json(sys, *cand)}};
        return res;
    }
    const auto& w = std::get<ReducibilityWitness>(out);
    Factorization f = factorize(sys, w.family, opt.algo.rank_tol);
    PartResult a = analyze_system(f.restriction, opt, depth + 1);
    PartResult b = analyze_system(f.quotient, opt, depth + 1);
    std::vector<int> dims;
    for (const auto& basis : f.family.bases) dims.push_back(static_cast<int>(basis.cols()));
    res.lower = std::max(a.lower, b.lower);
    res.upper = std::max(a.upper, b.upper);
    res.certified = a.certified && b.certified;
    res.node = {{"type", "factor"},
                {"family_dims", dims},
                {"restriction", a.node},
                {"quotient", b.node}};
    return res;
}

PartResult analyze_system(const System& sys, const PipelineOptions& opt, int depth) {
    if (depth > 32) throw Error("analysis recursion is too deep");
    SccDecomposition scc = strongly_connected_components(sys);
    if (scc.components.size() == 1) return analyze_component(scc.subsystems[0], opt, depth);
    PartResult res;
    res.node = {{"type", "scc_split"}, {"components", json::array()}};
    for (size_t i = 0; i < scc.subsystems.size(); ++i) {
        PartResult part = analyze_component(scc.subsystems[i], opt, depth);
        std::vector<std::string> ids;
        for (int v : scc.components[i]) ids.push_back(sys.vertices[v].id);
        json comp = {{"vertices", ids}, {"analysis", part.node}};
        res.node["components"].push_back(comp);
        res.lower = std::max(res.lower, part.lower);
        res.upper = std::max(res.upper, part.upper);
        res.certified = res.certified && part.certified;
    }
    return res;
}

}  // namespace

JsrSummary compute_jsr(const System& sys, const PipelineOptions& opt) {
    JsrSummary sum;
    if (!opt.candidate_edges.empty()) {
        if (!is_strongly_connected(sys))
            throw Error("a manual candidate needs a strongly connected system");
        Path p;
        for (const auto& id : opt.candidate_edges) p.edges.push_back(sys.edge_index(id));
        if (p.edges.empty()) throw Error("the manual candidate walk is empty");
        SmpCandidate cand = candidate_from_cycle(sys, p, opt.l0);
        JsrOutcome out = run_invariant_polytope(sys, cand, opt.algo);
        if (const auto* c = std::get_if<Converged>(&out)) {
            double qhat = check_dominance(sys, cand, opt.l0);
            std::vector<int> sizes;
            for (const auto& group : c->certificate.vertices)
                sizes.push_back(static_cast<int>(group.size()));
            sum.lower = sum.upper = c->rho;
            sum.certified = true;
            sum.tree = {{"type", "leaf"},         {"outcome", "converged"},
                        {"rho", c->rho},          {"iterations", c->iterations},
                        {"dominance", qhat},      {"smp", smp_json(sys, cand)},
                        {"polytope_sizes", sizes}};
            sum.whole_certificate = *c;
            return sum;
        }
        if (const auto* b = std::get_if<Bracket>(&out)) {
            sum.lower = b->lower;
            sum.upper = b->upper;
            sum.tree = {{"type", "leaf"},
                        {"outcome", "bracket"},
                        {"lower", b->lower},
                        {"upper", b->upper},
                        {"smp", smp_json(sys, cand)}};
            return sum;
        }
        if (const auto* r = std::get_if<Rejected>(&out)) {
            sum.lower = cand.averaged_value;
            sum.upper = std::max(safe_upper(sys, opt.l0), sum.lower);
            sum.tree = {{"type", "leaf"},
                        {"outcome", "rejected"},
                        {"reason", reject_reason_name(r->reason)},
                        {"detail", r->detail},
                        {"lower", sum.lower},
                        {"upper", sum.upper}};
            return sum;
        }
        // An invariant family ends the manual path; the search pipeline
        // takes over on the factored parts.
    }
    PartResult res = analyze_system(sys, opt, 0);
    sum.lower = res.lower;
    sum.upper = res.upper;
    sum.certified = res.certified;
    sum.tree = res.node;
    sum.whole_certificate = std::move(res.converged);
    return sum;
}

}  // namespace cjsr
