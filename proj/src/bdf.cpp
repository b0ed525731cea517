#include "cjsr/bdf.hpp"

#include <cmath>
#include <string>

#include "cjsr/error.hpp"
#include "cjsr/graph.hpp"
#include "cjsr/smp.hpp"

namespace cjsr {

namespace {

void check_ratio(double w) {
    if (!(w > 0.0) || !std::isfinite(w)) throw Error("stepsize ratios must be positive and finite");
}

}  // namespace

Mat bdf3_matrix(double w1, double w2) {
    check_ratio(w1);
    check_ratio(w2);
    double den = (w1 + 1.0) * (3.0 * w1 * w2 * w2 + 4.0 * w1 * w2 + w1 + 2.0 * w2 + 1.0);
    double g0 = -w1 * w1 * w1 * w2 * w2 * (w2 + 1.0) * (w2 + 1.0) / den;
    double g1 = w2 * w2 *
                (w1 * w1 * w2 * w2 + 4.0 * w1 * w1 * w2 + 2.0 * w1 * w2 + 3.0 * w1 * w1 +
                 3.0 * w1 + 1.0) /
                den;
    Mat c(2, 2);
    c << g1, g0, 1.0, 0.0;
    return c;
}

Mat bdf4_matrix(double w1, double w2, double w3) {
    check_ratio(w1);
    check_ratio(w2);
    check_ratio(w3);
    double big = 3.0 * w2 * w3 * w3 + 4.0 * w2 * w3 + 2.0 * w3 + w2 +
                 w1 * (w2 * w2 * (4.0 * w3 + 1.0) * (w3 + 1.0) * (w3 + 1.0) + 2.0 * w3 +
                       2.0 * w2 * (3.0 * w3 * w3 + 4.0 * w3 + 1.0) + 1.0) +
                 1.0;
    double t = w3 * w2 + w2 + 1.0;
    double u = w1 * t + 1.0;
    double f = (w3 + 1.0) * (w3 + 1.0) * t * t * u * u /
               ((w2 + 1.0) * (w2 * w1 + w1 + 1.0) * big);
    double h = w3 * w3 * t * t * u * u / ((w1 + 1.0) * big);
    double g2 = f - 1.0;
    double g1 = -h + f - 1.0;
    double g0 = w1 * w1 * w1 * w1 * w2 * w2 * w2 * w3 * w3 * (w3 + 1.0) * (w3 + 1.0) * t * t /
                ((w1 + 1.0) * (w2 * w1 + w1 + 1.0) * big);
    Mat c(3, 3);
    c << g2, g1, g0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0;
    return c;
}

BdfBuild build_bdf_system(int order, const std::vector<double>& ratios) {
    if (order != 3 && order != 4) throw SchemaError("supported orders are 3 and 4");
    if (ratios.empty()) throw SchemaError("the ratio grid must be nonempty");
    for (double r : ratios) check_ratio(r);
    int m = static_cast<int>(ratios.size());
    int tuple_len = order - 1;
    int dim = order - 1;

    // Tuples of ratio indices, oldest first, lexicographic order.
    std::vector<std::vector<int>> tuples;
    std::vector<int> cur(tuple_len, 0);
    for (;;) {
        tuples.push_back(cur);
        int pos = tuple_len;
        while (pos > 0 && cur[pos - 1] == m - 1) cur[--pos] = 0;
        if (pos == 0) break;
        cur[pos - 1]++;
    }

    auto name = [&](const std::vector<int>& t) {
        std::string s;
        for (size_t i = 0; i < t.size(); ++i) {
            if (i) s += "-";
            s += std::to_string(t[i] + 1);
        }
        return s;
    };
    auto companion = [&](const std::vector<int>& t) {
        if (order == 3) return bdf3_matrix(ratios[t[0]], ratios[t[1]]);
        return bdf4_matrix(ratios[t[0]], ratios[t[1]], ratios[t[2]]);
    };

    std::vector<Vertex> verts;
    for (const auto& t : tuples) verts.push_back({name(t), dim});
    std::vector<EdgeSpec> edges;
    int n = 0;
    for (const auto& t : tuples)
        for (int b = 0; b < m; ++b) {
            std::vector<int> tgt(t.begin() + 1, t.end());
            tgt.push_back(b);
            edges.push_back({"e" + std::to_string(++n), name(t), name(tgt), "C" + name(tgt),
                             companion(tgt)});
        }
    BdfBuild out;
    out.full = build_system(verts, edges);
    out.merged = identify_vertices(out.full);
    return out;
}

ThetaSweep theta_sweep(int order, double theta_min, double theta_max, int steps) {
    if (order != 3 && order != 4) throw SchemaError("supported orders are 3 and 4");
    if (steps < 2) throw SchemaError("a sweep needs at least two steps");
    if (!(theta_min > 0.0) || !(theta_max > theta_min))
        throw SchemaError("the sweep range must satisfy 0 < min < max");
    ThetaSweep sw;
    auto at = [&](double th) {
        Mat c = order == 3 ? bdf3_matrix(th, th) : bdf4_matrix(th, th, th);
        return spectral_radius(c);
    };
    for (int i = 0; i < steps; ++i) {
        double th = theta_min + (theta_max - theta_min) * i / (steps - 1);
        sw.rows.push_back({th, at(th)});
    }
    for (size_t i = 0; i + 1 < sw.rows.size(); ++i) {
        double a = sw.rows[i].rho - 1.0;
        double b = sw.rows[i + 1].rho - 1.0;
        if (a == 0.0) {
            sw.crossing = sw.rows[i].theta;
            break;
        }
        if (a * b < 0.0) {
            double t = a / (a - b);
            sw.crossing = sw.rows[i].theta + t * (sw.rows[i + 1].theta - sw.rows[i].theta);
            break;
        }
    }
    if (sw.crossing) {
        double th = *sw.crossing;
        Mat c = order == 3 ? bdf3_matrix(th, th) : bdf4_matrix(th, th, th);
        if (classify_leading(c) == LeadingClass::complex_pair)
            sw.note = "complex leading eigenvalue; polytope certification out of scope";
    }
    return sw;
}

}  // namespace cjsr
