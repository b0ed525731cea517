#pragma once

#include <vector>

#include "cjsr/system.hpp"

namespace cjsr {

enum class BodyKind { absco, co_minus, co_plus };

const char* body_kind_name(BodyKind k);
BodyKind body_kind_from_name(const std::string& name);

// Generating vertices of a polytope body. For the cone kinds the body is the
// convex hull extended down (co_minus) or up (co_plus) by the nonnegative
// orthant, and all vertices must be componentwise nonnegative.
struct VertexSet {
    int dim = 0;
    BodyKind kind = BodyKind::absco;
    std::vector<Vec> pts;
};

VertexSet make_vertex_set(int dim, BodyKind kind, std::vector<Vec> pts);
void validate_vertex_set(const VertexSet& vs);
int spanning_rank(const std::vector<Vec>& pts, double tol = 1e-9);
bool full_rank(const VertexSet& vs, double tol = 1e-9);

// Appends the component of w orthogonal to the columns of basis when it is
// larger than tol relative to w, keeping the columns orthonormal.
// True when the basis grew.
bool grow_orthonormal_basis(Mat& basis, const Vec& w, double tol = 1e-9);

// Minkowski norm of the symmetrized hull: min sum |lambda| with V lambda = x.
// Returns +inf outside the span of the vertices.
double norm_absco(const VertexSet& vs, const Vec& x);

// Gauge of the downward monotone body: min sum lambda, lambda >= 0,
// V lambda >= x. Requires x >= 0; +inf when infeasible.
double norm_co_minus(const VertexSet& vs, const Vec& x);

// Antinorm of the upward body: max sum lambda, lambda >= 0, V lambda <= x.
// Requires x >= 0; 0 when only the trivial combination fits.
double antinorm_co_plus(const VertexSet& vs, const Vec& x);

// Dispatch on vs.kind.
double body_eval(const VertexSet& vs, const Vec& x);

}  // namespace cjsr
