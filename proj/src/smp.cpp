#include "cjsr/smp.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "cjsr/util.hpp"

namespace cjsr {

namespace {

constexpr double kClassGap = 1e-8;
constexpr double kTieGap = 1e-10;

struct ScoredCycle {
    double value;
    int length;
    std::vector<int> edges;
};

// Exact deterministic preference order; maximize flips the value sense.
bool better(const ScoredCycle& a, const ScoredCycle& b, bool maximize) {
    if (a.value != b.value) return maximize ? a.value > b.value : a.value < b.value;
    if (a.length != b.length) return a.length < b.length;
    return a.edges < b.edges;
}

std::vector<ScoredCycle> score_cycles(const System& sys, const std::vector<Path>& cycles) {
    std::vector<ScoredCycle> scored(cycles.size());
    parallel_for(cycles.size(), [&](std::size_t i) {
        const Path& p = cycles[i];
        Mat prod = product_along_path(sys, p);
        double rho = spectral_radius(prod);
        int len = static_cast<int>(p.edges.size());
        scored[i] = ScoredCycle{std::pow(rho, 1.0 / len), len, p.edges};
    });
    return scored;
}

std::optional<SmpCandidate> search(const System& sys, int l0, std::uint64_t cap, bool maximize) {
    auto cycles = enumerate_closed_walks(sys, l0, cap);
    if (cycles.empty()) return std::nullopt;
    auto scored = score_cycles(sys, cycles);

    std::size_t best = 0;
    for (std::size_t i = 1; i < scored.size(); ++i)
        if (better(scored[i], scored[best], maximize)) best = i;
    std::size_t second = scored.size();
    for (std::size_t i = 0; i < scored.size(); ++i) {
        if (i == best) continue;
        if (second == scored.size() || better(scored[i], scored[second], maximize)) second = i;
    }

    SmpCandidate cand;
    cand.cycle.edges = scored[best].edges;
    cand.averaged_value = scored[best].value;
    cand.leading_class = classify_leading(product_along_path(sys, cand.cycle));
    if (second < scored.size()) {
        cand.second_value = scored[second].value;
        Path sp;
        sp.edges = scored[second].edges;
        cand.second_cycle = sp;
        double scale = std::max(std::abs(cand.averaged_value), 1e-300);
        cand.tie = std::abs(scored[second].value - cand.averaged_value) <= kTieGap * scale;
    }
    return cand;
}

}  // namespace

const char* leading_class_name(LeadingClass c) {
    switch (c) {
        case LeadingClass::real_simple: return "real_simple";
        case LeadingClass::real_multiple: return "real_multiple";
        case LeadingClass::complex_pair: return "complex_pair";
    }
    return "?";
}

LeadingClass classify_leading(const Mat& m) {
    if (m.rows() != m.cols()) throw Error("classify_leading: matrix not square");
    if (m.rows() == 1) return LeadingClass::real_simple;
    Eigen::EigenSolver<Mat> es(m, false);
    auto ev = es.eigenvalues();
    double top = ev.cwiseAbs().maxCoeff();
    if (top == 0.0) return LeadingClass::real_multiple;  // nilpotent, no leading direction
    int near_top = 0;
    bool complex_at_top = false;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (std::abs(ev(i)) >= top * (1.0 - kClassGap)) {
            ++near_top;
            if (std::abs(ev(i).imag()) > kClassGap * top) complex_at_top = true;
        }
    }
    if (complex_at_top) return LeadingClass::complex_pair;
    if (near_top > 1) return LeadingClass::real_multiple;
    return LeadingClass::real_simple;
}

std::optional<SmpCandidate> find_candidate_smp(const System& sys, int l0, std::uint64_t cap) {
    return search(sys, l0, cap, true);
}

std::optional<SmpCandidate> find_candidate_smp_min(const System& sys, int l0, std::uint64_t cap) {
    return search(sys, l0, cap, false);
}

SmpCandidate candidate_from_cycle(const System& sys, const Path& cycle, int l0, bool maximize,
                                  std::uint64_t cap) {
    if (!path_closed(sys, cycle)) throw Error("candidate cycle is not closed");
    SmpCandidate cand;
    cand.cycle = cycle;
    int len = static_cast<int>(cycle.edges.size());
    Mat prod = product_along_path(sys, cycle);
    cand.averaged_value = std::pow(spectral_radius(prod), 1.0 / len);
    cand.leading_class = classify_leading(prod);

    auto cycles = enumerate_closed_walks(sys, l0, cap);
    auto scored = score_cycles(sys, cycles);
    // Runner-up: best scored cycle that is not a rotation of the chosen one.
    std::vector<int> canon = cycle.edges;
    std::size_t second = scored.size();
    for (std::size_t i = 0; i < scored.size(); ++i) {
        bool same = scored[i].edges.size() == canon.size();
        if (same) {
            // enumeration emits canonical rotations; compare all rotations of ours
            same = false;
            int n = static_cast<int>(canon.size());
            for (int s = 0; s < n && !same; ++s) {
                bool eq = true;
                for (int k = 0; k < n && eq; ++k) eq = canon[(s + k) % n] == scored[i].edges[k];
                same = eq;
            }
        }
        if (same) continue;
        if (second == scored.size() || better(scored[i], scored[second], maximize)) second = i;
    }
    if (second < scored.size()) {
        cand.second_value = scored[second].value;
        Path sp;
        sp.edges = scored[second].edges;
        cand.second_cycle = sp;
        double scale = std::max(std::abs(cand.averaged_value), 1e-300);
        cand.tie = std::abs(scored[second].value - cand.averaged_value) <= kTieGap * scale;
    }
    return cand;
}

}  // namespace cjsr
