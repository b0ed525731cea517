#include "cjsr/reducibility.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <deque>

#include "cjsr/error.hpp"
#include "cjsr/graph.hpp"
#include "cjsr/polytope.hpp"
#include "cjsr/util.hpp"

namespace cjsr {

namespace {

void check_family_shape(const System& sys, const SubspaceFamily& fam) {
    if (static_cast<int>(fam.bases.size()) != sys.vertex_count())
        throw Error("subspace family size does not match the vertex count");
    for (int i = 0; i < sys.vertex_count(); ++i) {
        const Mat& b = fam.bases[i];
        if (b.cols() == 0) continue;
        if (b.rows() != sys.vertices[i].dim || b.cols() > b.rows())
            throw Error("subspace family has a badly shaped basis");
    }
}

Mat orthonormalize(const Mat& b, double tol) {
    if (b.cols() == 0) return Mat(b.rows(), 0);
    Mat q(b.rows(), 0);
    for (int j = 0; j < b.cols(); ++j) grow_orthonormal_basis(q, b.col(j), tol);
    return q;
}

Mat complement_basis(const Mat& q) {
    int d = static_cast<int>(q.rows());
    int r = static_cast<int>(q.cols());
    if (r == 0) return Mat::Identity(d, d);
    if (r == d) return Mat(d, 0);
    // Orthonormal columns completing q, via full QR of q.
    Eigen::HouseholderQR<Mat> qr(q);
    Mat full = qr.householderQ() * Mat::Identity(d, d);
    return full.rightCols(d - r);
}

}  // namespace

bool family_is_strict(const System& sys, const SubspaceFamily& fam) {
    check_family_shape(sys, fam);
    bool some_nonzero = false;
    bool some_proper = false;
    for (int i = 0; i < sys.vertex_count(); ++i) {
        if (fam.bases[i].cols() > 0) some_nonzero = true;
        if (fam.bases[i].cols() < sys.vertices[i].dim) some_proper = true;
    }
    return some_nonzero && some_proper;
}

double family_residual(const System& sys, const SubspaceFamily& fam) {
    check_family_shape(sys, fam);
    double worst = 0.0;
    for (const auto& e : sys.edges) {
        const Mat& bs = fam.bases[e.from];
        if (bs.cols() == 0) continue;
        const Mat& bt = fam.bases[e.to];
        Mat img = e.m * bs;
        Mat out = img;
        if (bt.cols() > 0) out -= bt * (bt.transpose() * img);
        double esc = out.norm() / (1.0 + e.m.norm());
        worst = std::max(worst, esc);
    }
    return worst;
}

SubspaceFamily orbit_span(const System& sys, int vertex, const Vec& x, double rank_tol) {
    if (vertex < 0 || vertex >= sys.vertex_count()) throw Error("orbit_span: bad vertex index");
    if (x.size() != sys.vertices[vertex].dim) throw Error("orbit_span: bad vector dimension");
    SubspaceFamily fam;
    for (const auto& v : sys.vertices) fam.bases.push_back(Mat(v.dim, 0));
    std::deque<std::pair<int, Vec>> work;
    if (grow_orthonormal_basis(fam.bases[vertex], x, rank_tol))
        work.emplace_back(vertex, fam.bases[vertex].col(0));
    while (!work.empty()) {
        auto [u, v] = work.front();
        work.pop_front();
        for (int ei : sys.out[u]) {
            const Edge& e = sys.edges[ei];
            Vec w = e.m * v;
            if (grow_orthonormal_basis(fam.bases[e.to], w, rank_tol))
                work.emplace_back(e.to, fam.bases[e.to].rightCols(1));
        }
    }
    return fam;
}

std::optional<SubspaceFamily> find_invariant_family(const System& sys,
                                                    const FamilySearchOptions& opt) {
    auto probe = [&](int vertex, const Vec& x) -> std::optional<SubspaceFamily> {
        if (x.norm() <= opt.rank_tol) return std::nullopt;
        SubspaceFamily fam = orbit_span(sys, vertex, x, opt.rank_tol);
        if (family_is_strict(sys, fam)) return fam;
        return std::nullopt;
    };

    for (int v = 0; v < sys.vertex_count(); ++v) {
        int d = sys.vertices[v].dim;
        for (int j = 0; j < d; ++j) {
            Vec x = Vec::Zero(d);
            x[j] = 1.0;
            if (auto fam = probe(v, x)) return fam;
        }
    }

    // Eigenvectors of short cycle products catch families that are not
    // axis aligned, such as blocks hidden by a change of basis.
    std::vector<Path> walks;
    try {
        walks = enumerate_closed_walks(sys, opt.cycle_len);
    } catch (const CapError&) {
        walks.clear();
    }
    for (const auto& w : walks) {
        Mat p = product_along_path(sys, w);
        Eigen::EigenSolver<Mat> es(p);
        if (es.info() != Eigen::Success) continue;
        int start = path_start(sys, w);
        Eigen::MatrixXcd evecs = es.eigenvectors();
        for (int j = 0; j < evecs.cols(); ++j) {
            Eigen::VectorXcd col = evecs.col(j);
            int big = 0;
            for (int i = 1; i < col.size(); ++i)
                if (std::abs(col[i]) > std::abs(col[big])) big = i;
            if (std::abs(col[big]) == 0.0) continue;
            Eigen::VectorXcd aligned = col * (std::conj(col[big]) / std::abs(col[big]));
            Vec re = aligned.real();
            Vec im = aligned.imag();
            if (auto fam = probe(start, re)) return fam;
            if (im.norm() > opt.rank_tol)
                if (auto fam = probe(start, im)) return fam;
        }
    }

    int trials = opt.random_trials >= 0 ? opt.random_trials : 20 * sys.total_dim();
    Rng rng(opt.seed);
    for (int t = 0; t < trials; ++t) {
        int v = t % sys.vertex_count();
        int d = sys.vertices[v].dim;
        Vec x(d);
        for (int j = 0; j < d; ++j) x[j] = rng.normal();
        if (auto fam = probe(v, x)) return fam;
    }
    return std::nullopt;
}

Factorization factorize(const System& sys, const SubspaceFamily& fam, double residual_tol) {
    check_family_shape(sys, fam);
    Factorization f;
    f.family.bases.reserve(sys.vertex_count());
    for (int i = 0; i < sys.vertex_count(); ++i)
        f.family.bases.push_back(orthonormalize(fam.bases[i], residual_tol));
    if (!family_is_strict(sys, f.family))
        throw Error("factorize needs a strict invariant family");
    double res = family_residual(sys, f.family);
    if (res > residual_tol) throw Error("factorize: family is not invariant, residual " +
                                        std::to_string(res));

    std::vector<Mat> comp;
    for (int i = 0; i < sys.vertex_count(); ++i) comp.push_back(complement_basis(f.family.bases[i]));

    std::vector<Vertex> rverts, qverts;
    std::vector<bool> in_r(sys.vertex_count(), false), in_q(sys.vertex_count(), false);
    for (int i = 0; i < sys.vertex_count(); ++i) {
        int r = static_cast<int>(f.family.bases[i].cols());
        int q = sys.vertices[i].dim - r;
        if (r > 0) {
            in_r[i] = true;
            rverts.push_back({sys.vertices[i].id, r});
            f.restriction_map.push_back(i);
        }
        if (q > 0) {
            in_q[i] = true;
            qverts.push_back({sys.vertices[i].id, q});
            f.quotient_map.push_back(i);
        }
    }

    std::vector<EdgeSpec> redges, qedges;
    for (const auto& e : sys.edges) {
        const Mat& bs = f.family.bases[e.from];
        const Mat& bt = f.family.bases[e.to];
        const Mat& cs = comp[e.from];
        const Mat& ct = comp[e.to];
        const std::string& sfrom = sys.vertices[e.from].id;
        const std::string& sto = sys.vertices[e.to].id;
        if (in_r[e.from] && in_r[e.to])
            redges.push_back({e.id, sfrom, sto, e.label, bt.transpose() * e.m * bs});
        if (in_q[e.from] && in_q[e.to])
            qedges.push_back({e.id, sfrom, sto, e.label, ct.transpose() * e.m * cs});
        Mat link = (bt.cols() > 0 && cs.cols() > 0) ? Mat(bt.transpose() * e.m * cs)
                                                    : Mat(bt.cols(), cs.cols());
        f.coupling.push_back(link);
    }
    if (rverts.empty() || qverts.empty()) throw Error("factorize produced an empty part");
    f.restriction = build_system(rverts, redges);
    f.quotient = build_system(qverts, qedges);
    return f;
}

std::vector<System> irreducible_blocks(const System& sys, const FamilySearchOptions& opt) {
    auto fam = find_invariant_family(sys, opt);
    if (!fam) return {sys};
    Factorization f = factorize(sys, *fam, opt.rank_tol);
    std::vector<System> out = irreducible_blocks(f.restriction, opt);
    std::vector<System> more = irreducible_blocks(f.quotient, opt);
    out.insert(out.end(), more.begin(), more.end());
    return out;
}

}  // namespace cjsr
