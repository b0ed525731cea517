#include "cjsr/ipa.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "cjsr/error.hpp"
#include "cjsr/graph.hpp"
#include "cjsr/util.hpp"

namespace cjsr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Safety margin on prefilter decisions taken against a stale polytope.
constexpr double kLpSlack = 1e-9;

bool maximizing(BodyKind kind) { return kind != BodyKind::co_plus; }

std::string cycle_text(const System& sys, const Path& cycle) {
    std::ostringstream os;
    auto ids = path_edge_ids(sys, cycle);
    for (size_t i = 0; i < ids.size(); ++i) {
        if (i) os << ",";
        os << ids[i];
    }
    return os.str();
}

// Real leading eigenvector, unit length, largest-magnitude entry positive.
Vec leading_real_eigenvector(const Mat& p) {
    Eigen::EigenSolver<Mat> es(p);
    if (es.info() != Eigen::Success) throw Error("eigen decomposition failed on cycle product");
    const auto& vals = es.eigenvalues();
    int lead = 0;
    for (int i = 1; i < vals.size(); ++i)
        if (std::abs(vals[i]) > std::abs(vals[lead])) lead = i;
    Eigen::VectorXcd v = es.eigenvectors().col(lead);
    int big = 0;
    for (int i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[big])) big = i;
    if (std::abs(v[big]) == 0.0) throw Error("degenerate leading eigenvector");
    v *= std::conj(v[big]) / std::abs(v[big]);
    Vec r = v.real();
    double n = r.norm();
    if (n == 0.0) throw Error("degenerate leading eigenvector");
    return r / n;
}

double eval_or_default(const VertexSet& body, const Vec& x) {
    if (body.pts.empty()) return maximizing(body.kind) ? kInf : 0.0;
    return body_eval(body, x);
}

bool is_duplicate(const std::vector<Vec>& pts, const Vec& w, bool sign_free, double eps) {
    double scale = std::max(1.0, w.lpNorm<Eigen::Infinity>());
    for (const auto& v : pts) {
        if (v.size() != w.size()) continue;
        if ((v - w).lpNorm<Eigen::Infinity>() <= eps * scale) return true;
        if (sign_free && (v + w).lpNorm<Eigen::Infinity>() <= eps * scale) return true;
    }
    return false;
}

int total_span_dim(const std::vector<Mat>& span) {
    int d = 0;
    for (const auto& b : span) d += static_cast<int>(b.cols());
    return d;
}

}  // namespace

const char* reject_reason_name(RejectReason r) {
    switch (r) {
        case RejectReason::complex_leading: return "complex_leading";
        case RejectReason::multiple_leading: return "multiple_leading";
        case RejectReason::tie: return "tie";
        case RejectReason::degenerate_perron: return "degenerate_perron";
    }
    return "?";
}

System scale_system(const System& sys, double candidate_value) {
    if (!(candidate_value > 0.0) || !std::isfinite(candidate_value))
        throw Error("scale_system: candidate value must be positive and finite");
    System out = sys;
    for (auto& e : out.edges) e.m /= candidate_value;
    out.finalize();
    return out;
}

std::optional<PolytopeState> seed_eigenvectors(const System& scaled, const SmpCandidate& cand,
                                               const AlgorithmOptions& opt, BodyKind kind,
                                               std::string* why) {
    const Path& cycle = cand.cycle;
    if (!path_closed(scaled, cycle)) throw Error("seed_eigenvectors: candidate walk is not closed");
    Mat p = product_along_path(scaled, cycle);
    Vec v1 = leading_real_eigenvector(p);

    if (!maximizing(kind) || kind == BodyKind::co_minus) {
        // Cone variants need a strictly positive Perron vector.
        double top = v1.maxCoeff();
        double bot = v1.minCoeff();
        if (top < -bot) {
            v1 = -v1;
            top = v1.maxCoeff();
        }
        for (int i = 0; i < v1.size(); ++i)
            if (v1[i] < 0.0 && v1[i] >= -1e-9 * top) v1[i] = 0.0;
        if (v1.minCoeff() < 0.0 || v1.minCoeff() <= 1e-12 * top) {
            if (why)
                *why = "leading eigenvector of cycle " + cycle_text(scaled, cycle) +
                       " is not strictly positive";
            return std::nullopt;
        }
        v1 /= v1.norm();
    }

    PolytopeState st;
    st.kind = kind;
    int n = scaled.vertex_count();
    st.verts.resize(n);
    st.span.assign(n, Mat());
    for (int i = 0; i < n; ++i) {
        st.bodies.push_back(VertexSet{scaled.vertices[i].dim, kind, {}});
        st.span[i] = Mat(scaled.vertices[i].dim, 0);
    }

    int at = path_start(scaled, cycle);
    Vec w = v1;
    int seed_id = 0;
    auto push_seed = [&](int vertex, const Vec& vec) {
        if (is_duplicate(st.bodies[vertex].pts, vec, kind == BodyKind::absco, opt.duplicate_eps))
            return;
        CertVertex cv;
        cv.coords = vec;
        cv.seed = seed_id++;
        st.verts[vertex].push_back(std::move(cv));
        st.bodies[vertex].pts.push_back(vec);
        st.frontier.emplace_back(vertex, static_cast<int>(st.verts[vertex].size()) - 1);
        grow_orthonormal_basis(st.span[vertex], vec, opt.rank_tol);
    };
    push_seed(at, w);
    for (size_t i = 0; i < cycle.edges.size(); ++i) {
        const Edge& e = scaled.edges[cycle.edges[i]];
        w = e.m * w;
        at = e.to;
        if (i + 1 < cycle.edges.size()) push_seed(at, w);
    }
    double err = std::min((w - v1).norm(), (w + v1).norm());
    if (err > 1e-9)
        throw Error("seed_eigenvectors: cycle walk does not return to its leading eigenvector");
    return st;
}

namespace {

struct RoundTask {
    int src_vertex;
    int src_index;
    int edge;
};

struct TaskEval {
    Vec w;
    double snap_val = 0.0;
    bool snap_dup = false;
};

struct BracketInfo {
    double max_norm = 0.0;   // largest membership value of any mapped vertex
    double min_norm = kInf;  // smallest, used by the minimal variant
    bool saw_infinite = false;
};

BracketInfo scan_images(const System& scaled, const PolytopeState& st) {
    BracketInfo info;
    for (int u = 0; u < scaled.vertex_count(); ++u) {
        for (const auto& cv : st.verts[u]) {
            for (int ei : scaled.out[u]) {
                const Edge& e = scaled.edges[ei];
                double val = eval_or_default(st.bodies[e.to], e.m * cv.coords);
                if (std::isinf(val)) {
                    info.saw_infinite = true;
                    continue;
                }
                info.max_norm = std::max(info.max_norm, val);
                info.min_norm = std::min(info.min_norm, val);
            }
        }
    }
    return info;
}

double max_operator_norm(const System& scaled) {
    double g = 0.0;
    for (const auto& e : scaled.edges) g = std::max(g, operator_norm(e.m));
    return g;
}

}  // namespace

JsrOutcome run_polytope_engine(const System& sys, const SmpCandidate& cand,
                               const AlgorithmOptions& opt, BodyKind kind) {
    if (!is_strongly_connected(sys))
        throw Error(
            "invariant polytope iteration needs a strongly connected graph; "
            "split with strongly_connected_components first");
    if (cand.leading_class == LeadingClass::complex_pair)
        return Rejected{RejectReason::complex_leading,
                        "cycle " + cycle_text(sys, cand.cycle) +
                            " has a complex leading eigenvalue pair"};
    if (cand.leading_class == LeadingClass::real_multiple)
        return Rejected{RejectReason::multiple_leading,
                        "cycle " + cycle_text(sys, cand.cycle) +
                            " has a repeated leading eigenvalue"};
    if (cand.tie) {
        std::string d = "another walk attains the candidate value";
        if (cand.second_cycle)
            d = "walk " + cycle_text(sys, *cand.second_cycle) + " attains the candidate value";
        return Rejected{RejectReason::tie, d};
    }

    System scaled = scale_system(sys, cand.averaged_value);
    std::string why;
    auto seeded = seed_eigenvectors(scaled, cand, opt, kind, &why);
    if (!seeded) return Rejected{RejectReason::degenerate_perron, why};
    PolytopeState st = std::move(*seeded);

    const bool maxi = maximizing(kind);
    const bool sign_free = kind == BodyKind::absco;
    const int total_dim = scaled.total_dim();
    int prev_span = total_span_dim(st.span);
    std::vector<int> version(scaled.vertex_count(), 0);

    for (;;) {
        if (st.frontier.empty()) {
            if (maxi && total_span_dim(st.span) < total_dim)
                return ReducibilityWitness{SubspaceFamily{st.span}, cand};
            Converged res;
            res.rho = cand.averaged_value;
            res.certificate = Certificate{kind, st.verts};
            res.iterations = st.rounds_with_additions;
            res.smp = cand;
            return res;
        }
        if (st.passes >= opt.max_iter) {
            BracketInfo info = scan_images(scaled, st);
            Bracket br;
            br.smp = cand;
            if (maxi) {
                double gamma =
                    info.saw_infinite ? max_operator_norm(scaled) : std::max(info.max_norm, 1.0);
                br.lower = cand.averaged_value;
                br.upper = cand.averaged_value * std::max(gamma, 1.0);
            } else {
                double mu = std::min(info.min_norm, 1.0);
                if (!std::isfinite(mu) || mu < 0.0) mu = 0.0;
                br.lower = cand.averaged_value * mu;
                br.upper = cand.averaged_value;
            }
            return br;
        }
        st.passes++;

        std::vector<std::pair<int, int>> items = std::move(st.frontier);
        st.frontier.clear();
        std::vector<RoundTask> tasks;
        for (const auto& [u, idx] : items)
            for (int ei : scaled.out[u]) tasks.push_back({u, idx, ei});

        // Phase 1: evaluate every image against a snapshot of the current
        // polytopes. Decisions that stay valid as the polytopes grow are
        // taken from these values, so thread count cannot change results.
        std::vector<VertexSet> snap = st.bodies;
        std::vector<int> snap_version = version;
        std::vector<TaskEval> evals(tasks.size());
        parallel_for(tasks.size(), [&](size_t i) {
            const RoundTask& t = tasks[i];
            const Edge& e = scaled.edges[t.edge];
            TaskEval r;
            r.w = e.m * st.verts[t.src_vertex][t.src_index].coords;
            r.snap_dup = is_duplicate(snap[e.to].pts, r.w, sign_free, opt.duplicate_eps);
            if (!r.snap_dup) r.snap_val = eval_or_default(snap[e.to], r.w);
            evals[i] = std::move(r);
        });

        // Phase 2: commit in canonical order. New vertices join the polytope
        // immediately and shrink the test for later images in the same round.
        int added = 0;
        for (size_t i = 0; i < tasks.size(); ++i) {
            const RoundTask& t = tasks[i];
            const Edge& e = scaled.edges[t.edge];
            int tgt = e.to;
            TaskEval& r = evals[i];
            if (r.snap_dup) continue;
            double val;
            if (version[tgt] == snap_version[tgt]) {
                val = r.snap_val;
            } else {
                // A vertex inside the snapshot stays inside the grown body.
                if (maxi && r.snap_val < 1.0 - opt.tol - kLpSlack) continue;
                if (!maxi && r.snap_val > 1.0 + opt.tol + kLpSlack) continue;
                if (is_duplicate(st.bodies[tgt].pts, r.w, sign_free, opt.duplicate_eps)) continue;
                val = eval_or_default(st.bodies[tgt], r.w);
            }
            if (maxi ? (val < 1.0 - opt.tol) : (val > 1.0 + opt.tol)) continue;
            if (!maxi && r.w.lpNorm<Eigen::Infinity>() <= 1e-300) continue;
            const CertVertex& parent = st.verts[t.src_vertex][t.src_index];
            CertVertex cv;
            cv.coords = r.w;
            cv.seed = parent.seed;
            cv.gen_edges = parent.gen_edges;
            cv.gen_edges.push_back(t.edge);
            cv.flagged = val > 1.0 - opt.tol && val <= 1.0 + opt.tol;
            st.verts[tgt].push_back(std::move(cv));
            st.bodies[tgt].pts.push_back(r.w);
            version[tgt]++;
            st.frontier.emplace_back(tgt, static_cast<int>(st.verts[tgt].size()) - 1);
            if (maxi) grow_orthonormal_basis(st.span[tgt], r.w, opt.rank_tol);
            added++;
        }
        if (added > 0) st.rounds_with_additions++;

        if (maxi && !st.frontier.empty()) {
            int now = total_span_dim(st.span);
            // Spans that stop growing before filling every vertex space are
            // an invariant family: all images of spanning vectors landed
            // inside the spans this round, and older images did so earlier.
            if (now == prev_span && now < total_dim)
                return ReducibilityWitness{SubspaceFamily{st.span}, cand};
            prev_span = now;
        }
    }
}

JsrOutcome run_invariant_polytope(const System& sys, const SmpCandidate& cand,
                                  const AlgorithmOptions& opt) {
    if (opt.cone_mode && !sys.nonnegative())
        throw Error("cone mode needs nonnegative edge matrices");
    return run_polytope_engine(sys, cand, opt, opt.cone_mode ? BodyKind::co_minus : BodyKind::absco);
}

double check_dominance(const System& sys, const SmpCandidate& cand, int l0, Path* achieving) {
    auto walks = enumerate_closed_walks(sys, l0);
    // The candidate is stored in canonical rotation by the search; a user
    // supplied walk is canonicalized by candidate_from_cycle, so comparing
    // edge sequences directly identifies it in the enumeration.
    double best = 0.0;
    const std::vector<int>& mine = cand.cycle.edges;
    std::vector<double> vals(walks.size(), 0.0);
    parallel_for(walks.size(), [&](size_t i) {
        vals[i] = std::pow(spectral_radius(product_along_path(sys, walks[i])),
                           1.0 / static_cast<double>(walks[i].edges.size()));
    });
    for (size_t i = 0; i < walks.size(); ++i) {
        if (walks[i].edges == mine) continue;
        double q = vals[i] / cand.averaged_value;
        if (q > best) {
            best = q;
            if (achieving) *achieving = walks[i];
        }
    }
    return best;
}

double verify_certificate(const System& sys, const Converged& res) {
    const Certificate& cert = res.certificate;
    if (static_cast<int>(cert.vertices.size()) != sys.vertex_count())
        throw Error("verify_certificate: certificate shape does not match the system");
    System scaled = scale_system(sys, res.rho);
    std::vector<VertexSet> bodies;
    for (int i = 0; i < sys.vertex_count(); ++i) {
        VertexSet vs{sys.vertices[i].dim, cert.kind, {}};
        for (const auto& cv : cert.vertices[i]) {
            if (cv.coords.size() != sys.vertices[i].dim)
                throw Error("verify_certificate: polytope vertex has wrong dimension");
            vs.pts.push_back(cv.coords);
        }
        bodies.push_back(std::move(vs));
    }
    struct Probe {
        int vertex;
        int index;
        int edge;
    };
    std::vector<Probe> probes;
    for (int u = 0; u < sys.vertex_count(); ++u)
        for (int i = 0; i < static_cast<int>(cert.vertices[u].size()); ++i)
            for (int ei : scaled.out[u]) probes.push_back({u, i, ei});
    std::vector<double> vals(probes.size(), 0.0);
    parallel_for(probes.size(), [&](size_t i) {
        const Edge& e = scaled.edges[probes[i].edge];
        vals[i] = eval_or_default(bodies[e.to],
                                  e.m * cert.vertices[probes[i].vertex][probes[i].index].coords);
    });
    // Maximal variants certify by every image staying inside: report the
    // worst (largest) membership value. The minimal variant certifies by
    // images staying outside, so the worst value is the smallest.
    bool maxi = maximizing(cert.kind);
    double worst = maxi ? 0.0 : kInf;
    for (double v : vals) worst = maxi ? std::max(worst, v) : std::min(worst, v);
    if (!maxi && probes.empty()) return 0.0;
    return worst;
}

}  // namespace cjsr
