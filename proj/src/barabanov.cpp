#include "cjsr/barabanov.hpp"

#include <cmath>

#include "cjsr/error.hpp"
#include "cjsr/smp.hpp"
#include "cjsr/util.hpp"

namespace cjsr {

System dualize(const System& sys) {
    System out = sys;
    for (size_t i = 0; i < out.edges.size(); ++i) {
        out.edges[i].from = sys.edges[i].to;
        out.edges[i].to = sys.edges[i].from;
        out.edges[i].m = sys.edges[i].m.transpose();
    }
    out.finalize();
    return out;
}

double multinorm_eval(const BarabanovMultinorm& mn, int vertex, const Vec& x) {
    if (vertex < 0 || vertex >= static_cast<int>(mn.generators.size()))
        throw Error("multinorm_eval: bad vertex index");
    double best = 0.0;
    for (const auto& u : mn.generators[vertex]) best = std::max(best, std::abs(u.dot(x)));
    return best;
}

BarabanovResult barabanov_multinorm(const System& sys, const AlgorithmOptions& opt, int l0) {
    System dual = dualize(sys);
    auto cand = find_candidate_smp(dual, l0);
    if (!cand) throw Error("barabanov_multinorm needs a graph with closed walks");
    BarabanovResult res{run_polytope_engine(dual, *cand, opt, BodyKind::absco), std::nullopt};
    if (const auto* conv = std::get_if<Converged>(&res.outcome)) {
        BarabanovMultinorm mn;
        mn.rho = conv->rho;
        mn.generators.resize(dual.vertex_count());
        for (int i = 0; i < dual.vertex_count(); ++i)
            for (const auto& cv : conv->certificate.vertices[i])
                mn.generators[i].push_back(cv.coords);
        res.multinorm = std::move(mn);
    }
    return res;
}

double verify_invariance(const System& sys, const BarabanovMultinorm& mn, int samples_per_vertex,
                         std::uint64_t seed) {
    if (static_cast<int>(mn.generators.size()) != sys.vertex_count())
        throw Error("verify_invariance: multinorm does not match the system");
    System scaled = scale_system(sys, mn.rho);
    Rng rng(seed);
    double worst = 0.0;
    for (int i = 0; i < sys.vertex_count(); ++i) {
        if (scaled.out[i].empty()) continue;
        int d = sys.vertices[i].dim;
        for (int s = 0; s < samples_per_vertex; ++s) {
            Vec x(d);
            double n = 0.0;
            do {
                for (int j = 0; j < d; ++j) x[j] = rng.normal();
                n = x.norm();
            } while (n == 0.0);
            x /= n;
            double lhs = multinorm_eval(mn, i, x);
            double rhs = 0.0;
            for (int ei : scaled.out[i]) {
                const Edge& e = scaled.edges[ei];
                rhs = std::max(rhs, multinorm_eval(mn, e.to, e.m * x));
            }
            worst = std::max(worst, std::abs(rhs - lhs));
        }
    }
    return worst;
}

}  // namespace cjsr
