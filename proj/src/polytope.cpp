#include "cjsr/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/QR>

namespace cjsr {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPivEps = 1e-11;
constexpr double kFeasTol = 1e-9;
constexpr int kMaxPivots = 200000;

// Dense two-phase primal simplex, Bland's rule throughout. Deterministic:
// entering = lowest eligible column, leaving = lowest basic index among
// minimal ratios. Solves min c.z subject to A z = b, z >= 0.
struct SimplexResult {
    bool feasible = false;
    double value = 0.0;
};

SimplexResult simplex_min(const Mat& A, const Vec& b, const Vec& c) {
    int m = static_cast<int>(A.rows());
    int n = static_cast<int>(A.cols());
    int ntot = n + m;  // artificials occupy columns n .. n+m-1

    Mat T(m, ntot + 1);
    T.setZero();
    T.block(0, 0, m, n) = A;
    for (int i = 0; i < m; ++i) {
        if (b(i) >= 0.0) {
            T(i, n + i) = 1.0;
            T(i, ntot) = b(i);
        } else {
            T.row(i).head(n) = -A.row(i);
            T(i, n + i) = 1.0;
            T(i, ntot) = -b(i);
        }
    }
    std::vector<int> basis(m);
    for (int i = 0; i < m; ++i) basis[i] = n + i;

    Eigen::RowVectorXd cost(ntot + 1);

    auto pivot = [&](int row, int col) {
        T.row(row) /= T(row, col);
        for (int i = 0; i < m; ++i) {
            if (i == row) continue;
            double f = T(i, col);
            if (f != 0.0) T.row(i) -= f * T.row(row);
        }
        double f = cost(col);
        if (f != 0.0) cost -= f * T.row(row);
        basis[row] = col;
    };

    auto run = [&](int allowed_cols, bool objective_bounded) -> bool {
        for (int step = 0; step < kMaxPivots; ++step) {
            int enter = -1;
            for (int j = 0; j < allowed_cols; ++j) {
                if (cost(j) < -kPivEps) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return true;  // optimal
            int leave = -1;
            double best_ratio = 0.0;
            for (int i = 0; i < m; ++i) {
                double a = T(i, enter);
                if (a <= kPivEps) continue;
                double rhs = std::max(T(i, ntot), 0.0);
                double ratio = rhs / a;
                if (leave < 0 || ratio < best_ratio ||
                    (ratio == best_ratio && basis[i] < basis[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave < 0) {
                // A dead-end column under a bounded objective is drift in the
                // cost row, not a real ray; drop it and move on.
                if (objective_bounded) {
                    cost(enter) = 0.0;
                    continue;
                }
                return false;  // unbounded
            }
            pivot(leave, enter);
        }
        throw LpError("simplex pivot cap exceeded");
    };

    // Phase 1: minimize the artificial total.
    cost.setZero();
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += T(i, j);
        cost(j) = -s;
    }
    {
        double s = 0.0;
        for (int i = 0; i < m; ++i) s += T(i, ntot);
        cost(ntot) = -s;
    }
    run(ntot, true);  // the artificial total is bounded below by zero

    double art_total = 0.0;
    for (int i = 0; i < m; ++i)
        if (basis[i] >= n) art_total += std::max(T(i, ntot), 0.0);
    double bscale = std::max(1.0, b.cwiseAbs().maxCoeff());
    SimplexResult res;
    if (art_total > kFeasTol * bscale) {
        res.feasible = false;
        return res;
    }

    // Remove artificials from the basis; rows they cannot leave are redundant.
    for (int i = m - 1; i >= 0; --i) {
        if (basis[i] < n) continue;
        int col = -1;
        for (int j = 0; j < n; ++j) {
            if (std::abs(T(i, j)) > kPivEps) {
                col = j;
                break;
            }
        }
        if (col >= 0) {
            pivot(i, col);
        } else {
            // redundant constraint: drop the row
            int last = m - 1;
            if (i != last) {
                T.row(i).swap(T.row(last));
                std::swap(basis[i], basis[last]);
            }
            --m;
            T.conservativeResize(m, Eigen::NoChange);
            basis.pop_back();
        }
    }

    // Phase 2 with the real objective; artificial columns are never eligible.
    cost.setZero();
    for (int j = 0; j < n; ++j) cost(j) = c(j);
    for (int i = 0; i < m; ++i) {
        double f = cost(basis[i]);
        if (f != 0.0) cost -= f * T.row(i);
    }
    if (!run(n, false)) throw LpError("objective unbounded");

    double value = 0.0;
    for (int i = 0; i < m; ++i)
        if (basis[i] < n) value += c(basis[i]) * std::max(T(i, ntot), 0.0);
    res.feasible = true;
    res.value = value;
    return res;
}

void check_point(const VertexSet& vs, const Vec& x, bool require_nonneg) {
    if (static_cast<int>(x.size()) != vs.dim) throw Error("point dimension mismatch");
    if (!x.allFinite()) throw Error("point has non-finite entries");
    if (require_nonneg && (x.array() < 0.0).any())
        throw Error("cone body evaluation needs a nonnegative point");
}

}  // namespace

const char* body_kind_name(BodyKind k) {
    switch (k) {
        case BodyKind::absco: return "absco";
        case BodyKind::co_minus: return "co_minus";
        case BodyKind::co_plus: return "co_plus";
    }
    return "?";
}

BodyKind body_kind_from_name(const std::string& name) {
    if (name == "absco") return BodyKind::absco;
    if (name == "co_minus") return BodyKind::co_minus;
    if (name == "co_plus") return BodyKind::co_plus;
    throw Error("unknown body kind '" + name + "'");
}

VertexSet make_vertex_set(int dim, BodyKind kind, std::vector<Vec> pts) {
    VertexSet vs{dim, kind, std::move(pts)};
    validate_vertex_set(vs);
    return vs;
}

void validate_vertex_set(const VertexSet& vs) {
    if (vs.dim < 1) throw Error("vertex set dimension must be >= 1");
    if (vs.pts.empty()) throw Error("vertex set is empty");
    for (const auto& p : vs.pts) {
        if (static_cast<int>(p.size()) != vs.dim) throw Error("vertex dimension mismatch");
        if (!p.allFinite()) throw Error("vertex with non-finite entries");
        if (vs.kind != BodyKind::absco && (p.array() < 0.0).any())
            throw Error("cone vertex sets must be componentwise nonnegative");
        if (vs.kind == BodyKind::co_plus && p.lpNorm<Eigen::Infinity>() == 0.0)
            throw Error("co_plus vertex sets cannot contain the zero vector");
    }
}

int spanning_rank(const std::vector<Vec>& pts, double tol) {
    if (pts.empty()) return 0;
    int d = static_cast<int>(pts[0].size());
    Mat M(d, static_cast<int>(pts.size()));
    for (int j = 0; j < static_cast<int>(pts.size()); ++j) M.col(j) = pts[j];
    Eigen::ColPivHouseholderQR<Mat> qr(M);
    qr.setThreshold(tol);
    return static_cast<int>(qr.rank());
}

bool full_rank(const VertexSet& vs, double tol) {
    return spanning_rank(vs.pts, tol) == vs.dim;
}

bool grow_orthonormal_basis(Mat& basis, const Vec& w, double tol) {
    Vec r = w;
    for (int pass = 0; pass < 2; ++pass)
        if (basis.cols() > 0) r -= basis * (basis.transpose() * r);
    double n = r.norm();
    if (n <= tol * std::max(1.0, w.norm())) return false;
    basis.conservativeResize(w.size(), basis.cols() + 1);
    basis.col(basis.cols() - 1) = r / n;
    return true;
}

double norm_absco(const VertexSet& vs, const Vec& x) {
    if (vs.kind != BodyKind::absco) throw Error("norm_absco needs an absco vertex set");
    check_point(vs, x, false);
    double scale = x.lpNorm<Eigen::Infinity>();
    if (scale == 0.0) return 0.0;
    int d = vs.dim, nv = static_cast<int>(vs.pts.size());
    if (d == 1) {
        double vmax = 0.0;
        for (const auto& p : vs.pts) vmax = std::max(vmax, std::abs(p(0)));
        return vmax > 0.0 ? std::abs(x(0)) / vmax : kInf;
    }
    Mat A(d, 2 * nv);
    for (int j = 0; j < nv; ++j) {
        A.col(j) = vs.pts[j];
        A.col(nv + j) = -vs.pts[j];
    }
    Vec c = Vec::Ones(2 * nv);
    auto r = simplex_min(A, x / scale, c);
    return r.feasible ? r.value * scale : kInf;
}

double norm_co_minus(const VertexSet& vs, const Vec& x) {
    if (vs.kind != BodyKind::co_minus) throw Error("norm_co_minus needs a co_minus vertex set");
    check_point(vs, x, true);
    double scale = x.lpNorm<Eigen::Infinity>();
    if (scale == 0.0) return 0.0;
    int d = vs.dim, nv = static_cast<int>(vs.pts.size());
    if (d == 1) {
        double vmax = 0.0;
        for (const auto& p : vs.pts) vmax = std::max(vmax, p(0));
        return vmax > 0.0 ? x(0) / vmax : kInf;
    }
    Mat A(d, nv + d);
    for (int j = 0; j < nv; ++j) A.col(j) = vs.pts[j];
    A.block(0, nv, d, d) = -Mat::Identity(d, d);
    Vec c = Vec::Zero(nv + d);
    c.head(nv).setOnes();
    auto r = simplex_min(A, x / scale, c);
    return r.feasible ? r.value * scale : kInf;
}

double antinorm_co_plus(const VertexSet& vs, const Vec& x) {
    if (vs.kind != BodyKind::co_plus) throw Error("antinorm_co_plus needs a co_plus vertex set");
    check_point(vs, x, true);
    double scale = x.lpNorm<Eigen::Infinity>();
    if (scale == 0.0) return 0.0;
    int d = vs.dim, nv = static_cast<int>(vs.pts.size());
    if (d == 1) {
        double vmin = kInf;
        for (const auto& p : vs.pts) vmin = std::min(vmin, p(0));
        return x(0) / vmin;  // vmin > 0 by vertex-set validation
    }
    Mat A(d, nv + d);
    for (int j = 0; j < nv; ++j) A.col(j) = vs.pts[j];
    A.block(0, nv, d, d) = Mat::Identity(d, d);
    Vec c = Vec::Zero(nv + d);
    c.head(nv).setConstant(-1.0);
    auto r = simplex_min(A, x / scale, c);
    if (!r.feasible) throw LpError("antinorm tableau infeasible for a nonnegative point");
    return -r.value * scale;
}

double body_eval(const VertexSet& vs, const Vec& x) {
    switch (vs.kind) {
        case BodyKind::absco: return norm_absco(vs, x);
        case BodyKind::co_minus: return norm_co_minus(vs, x);
        case BodyKind::co_plus: return antinorm_co_plus(vs, x);
    }
    throw Error("bad body kind");
}

}  // namespace cjsr
