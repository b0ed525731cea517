#include <cmath>
#include <variant>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"

#include "cjsr/error.hpp"
#include "cjsr/lsr.hpp"
#include "cjsr/smp.hpp"
#include "cjsr/system.hpp"

using namespace cjsr;
using cjsr_test::fixture;
using cjsr_test::loops;
using cjsr_test::mat2;

namespace {

// strictly positive pair whose slowest walk is the first self loop
System gentle_pair() {
    return loops({mat2(0.3, 0.2, 0.1, 0.4), mat2(0.5, 0.4, 0.3, 0.2)});
}

System growing_pair() {
    return loops({mat2(1.2, 0.1, 0.1, 1.2), mat2(1.1, 0.3, 0.2, 1.3)});
}

}  // namespace

TEST_CASE("minimal polytope run certifies a contracting pair") {
    System sys = gentle_pair();
    auto cand = find_candidate_smp_min(sys, 8);
    REQUIRE(cand.has_value());
    CHECK(cand->averaged_value == doctest::Approx(0.5).epsilon(1e-13));
    auto out = run_lsr_polytope(sys, *cand);
    REQUIRE(std::holds_alternative<Converged>(out));
    const auto& res = std::get<Converged>(out);
    CHECK(res.rho == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(res.certificate.kind == BodyKind::co_plus);
    // antinorm certificates verify from below
    CHECK(verify_certificate(sys, res) >= 1.0 - 1e-10);
}

TEST_CASE("lsr rejects systems with negative entries") {
    System sys = loops({mat2(1, -1, 0, 1)});
    auto cand = find_candidate_smp_min(sys, 4);
    REQUIRE(cand.has_value());
    CHECK_THROWS_AS(run_lsr_polytope(sys, *cand), Error);
}

TEST_CASE("stabilizability verdicts") {
    SUBCASE("certified contraction is stabilizable") {
        auto rep = is_stabilizable(gentle_pair());
        CHECK(rep.verdict == "stabilizable");
        CHECK(rep.lower == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(rep.upper == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("certified expansion is not") {
        auto rep = is_stabilizable(growing_pair());
        CHECK(rep.verdict == "not_stabilizable");
        CHECK(rep.lower >= 1.0);
    }
    SUBCASE("no closed walks leaves the question open") {
        Mat half = Mat::Identity(1, 1) * 0.5;
        System sys = build_system({{"a", 1}, {"b", 1}}, {{"e1", "a", "b", "M", half}});
        auto rep = is_stabilizable(sys);
        CHECK(rep.verdict == "unknown");
        CHECK_FALSE(rep.note.empty());
        CHECK(rep.lower <= rep.upper);
    }
}

TEST_CASE("verdicts survive an externally supplied outcome") {
    System sys = gentle_pair();
    auto cand = find_candidate_smp_min(sys, 8);
    auto out = run_lsr_polytope(sys, *cand);
    auto rep = stabilizability_verdict(sys, cand, &out, 8);
    CHECK(rep.verdict == "stabilizable");
    CHECK(rep.upper < 1.0);
}

TEST_CASE("minimizing brute force brackets the slowest growth") {
    System sys = gentle_pair();
    auto b = brute_force_min_bounds(sys, 5);
    CHECK(b.lower <= b.upper + 1e-12);
    CHECK(b.upper <= 0.5 + 1e-12);  // the best closed walk is already visible
    CHECK(b.lower > 0.0);

    Mat scalar(1, 1);
    scalar << 0.25;
    System single = loops({scalar});
    auto bs = brute_force_min_bounds(single, 3);
    CHECK(bs.lower == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(bs.upper == doctest::Approx(0.25).epsilon(1e-14));
}

TEST_CASE("zero matrices stabilize trivially") {
    Mat z = Mat::Zero(2, 2);
    System sys = loops({z, mat2(2, 0, 0, 2)});
    auto rep = is_stabilizable(sys);
    CHECK(rep.verdict == "stabilizable");
}
