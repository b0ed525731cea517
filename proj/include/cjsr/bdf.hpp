#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cjsr/system.hpp"

namespace cjsr {

// Companion matrix of the error recursion of the variable stepsize
// formula of order 3, as a function of the last two stepsize ratios.
Mat bdf3_matrix(double w1, double w2);

// Order 4 companion, three stepsize ratios.
Mat bdf4_matrix(double w1, double w2, double w3);

struct BdfBuild {
    System full;    // one vertex per ratio tuple
    System merged;  // after identifying vertices with equal outgoing structure
};

// Switching system over a finite grid of stepsize ratios: vertices are the
// (order-1) most recent ratios, oldest first; each edge shifts in a new
// ratio and carries the companion matrix of the target tuple.
BdfBuild build_bdf_system(int order, const std::vector<double>& ratios);

struct ThetaRow {
    double theta = 0.0;
    double rho = 0.0;
};

struct ThetaSweep {
    std::vector<ThetaRow> rows;
    std::optional<double> crossing;  // interpolated ratio where rho passes 1
    std::string note;
};

// Spectral radius of the constant-ratio companion over a theta grid.
ThetaSweep theta_sweep(int order, double theta_min, double theta_max, int steps);

}  // namespace cjsr
