#include <cmath>
#include <cstdlib>
#include <variant>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"

#include "cjsr/error.hpp"
#include "cjsr/ipa.hpp"
#include "cjsr/system.hpp"

using namespace cjsr;
using cjsr_test::fixture;
using cjsr_test::loops;
using cjsr_test::mat2;

namespace {

Converged expect_converged(const JsrOutcome& out) {
    REQUIRE(std::holds_alternative<Converged>(out));
    return std::get<Converged>(out);
}

std::vector<std::size_t> cert_sizes(const Converged& res) {
    std::vector<std::size_t> sizes;
    for (const auto& group : res.certificate.vertices) sizes.push_back(group.size());
    return sizes;
}

}  // namespace

TEST_CASE("scale_system divides every operator") {
    System sys = load_system_file(fixture("ex2.json"));
    System scaled = scale_system(sys, 2.0);
    for (int i = 0; i < sys.edge_count(); ++i)
        CHECK((scaled.edges[i].m * 2.0 - sys.edges[i].m).norm() == 0.0);
    System back = scale_system(scaled, 0.5);
    for (int i = 0; i < sys.edge_count(); ++i)
        CHECK((back.edges[i].m - sys.edges[i].m).norm() < 1e-15);
}

TEST_CASE("eigenvector seeding walks the candidate cycle") {
    System sys = load_system_file(fixture("ex2.json"));
    auto cand = find_candidate_smp(sys, 10);
    REQUIRE(cand.has_value());
    System scaled = scale_system(sys, cand->averaged_value);
    AlgorithmOptions opt;
    auto st = seed_eigenvectors(scaled, *cand, opt, BodyKind::absco);
    REQUIRE(st.has_value());
    // one seed per distinct cycle position, grouped by graph vertex
    std::vector<std::size_t> sizes;
    for (const auto& g : st->verts) sizes.push_back(g.size());
    CHECK(sizes == std::vector<std::size_t>{3, 2, 2});
    CHECK(st->frontier.size() == 7);
    for (int v = 0; v < 3; ++v) {
        CHECK(st->bodies[v].pts.size() == st->verts[v].size());
        for (const auto& cv : st->verts[v]) {
            CHECK(cv.seed >= 0);
            CHECK(cv.gen_edges.empty());
            CHECK(cv.coords.norm() > 0.0);
        }
    }
}

TEST_CASE("ex2 certifies the known radius") {
    System sys = load_system_file(fixture("ex2.json"));
    auto cand = find_candidate_smp(sys, 10);
    REQUIRE(cand.has_value());
    auto res = expect_converged(run_invariant_polytope(sys, *cand));
    CHECK(res.rho == doctest::Approx(1.4568457958169323).epsilon(1e-14));
    CHECK(res.iterations == 2);
    CHECK(cert_sizes(res) == std::vector<std::size_t>{5, 4, 5});
    CHECK(res.certificate.kind == BodyKind::absco);
    // the candidate walk closes exactly, so the worst membership pins at one
    double worst = verify_certificate(sys, res);
    CHECK(worst <= 1.0 + 1e-10);
    CHECK(worst >= 1.0 - 1e-9);
}

TEST_CASE("ex3 certifies with mixed dimensions") {
    System sys = load_system_file(fixture("ex3.json"));
    auto cand = find_candidate_smp(sys, 10);
    REQUIRE(cand.has_value());
    auto res = expect_converged(run_invariant_polytope(sys, *cand));
    CHECK(res.rho == doctest::Approx(1.5157165665103982).epsilon(1e-12));
    CHECK(res.iterations == 1);
    CHECK(cert_sizes(res) == std::vector<std::size_t>{2, 1, 3});
    CHECK(verify_certificate(sys, res) <= 1.0 + 1e-10);
}

TEST_CASE("the unconstrained embedding needs seven vertices") {
    System sys = load_system_file(fixture("ex2_unconstrained.json"));
    auto cand = find_candidate_smp(sys, 10);
    REQUIRE(cand.has_value());
    auto res = expect_converged(run_invariant_polytope(sys, *cand));
    CHECK(res.rho == doctest::Approx(1.6934758940360597).epsilon(1e-14));
    CHECK(cert_sizes(res) == std::vector<std::size_t>{7});
    CHECK(verify_certificate(sys, res) <= 1.0 + 1e-10);
}

TEST_CASE("certificate verification rejects a shrunk radius claim") {
    System sys = load_system_file(fixture("ex2.json"));
    auto cand = find_candidate_smp(sys, 10);
    auto res = expect_converged(run_invariant_polytope(sys, *cand));
    Converged forged = res;
    forged.rho = res.rho * 0.95;
    CHECK(verify_certificate(sys, forged) > 1.0 + 1e-10);
    // and a damaged polytope vertex breaks the fixed point
    Converged damaged = res;
    damaged.certificate.vertices[0][0].coords *= 0.5;
    CHECK(verify_certificate(sys, damaged) > 1.0 + 1e-6);
}

TEST_CASE("a lone triangular matrix is caught as reducible, not certified") {
    System sys = loops({mat2(1, 0, 0, 0.5)});
    auto cand = find_candidate_smp(sys, 3);
    REQUIRE(cand.has_value());
    auto out = run_invariant_polytope(sys, *cand);
    REQUIRE(std::holds_alternative<ReducibilityWitness>(out));
    const auto& fam = std::get<ReducibilityWitness>(out).family;
    REQUIRE(fam.bases[0].cols() == 1);
    // the leading eigenspace is the invariant line
    CHECK(std::abs(fam.bases[0](0, 0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(fam.bases[0](1, 0)) < 1e-12);
}

TEST_CASE("rejection reasons") {
    SUBCASE("complex leading pair") {
        double c = std::cos(1.0), s = std::sin(1.0);
        System sys = loops({mat2(c, -s, s, c) * 1.1});
        auto cand = find_candidate_smp(sys, 3);
        auto out = run_invariant_polytope(sys, *cand);
        REQUIRE(std::holds_alternative<Rejected>(out));
        CHECK(std::get<Rejected>(out).reason == RejectReason::complex_leading);
    }
    SUBCASE("repeated leading eigenvalue") {
        System sys = loops({Mat::Identity(2, 2) * 1.5});
        auto cand = find_candidate_smp(sys, 3);
        auto out = run_invariant_polytope(sys, *cand);
        REQUIRE(std::holds_alternative<Rejected>(out));
        CHECK(std::get<Rejected>(out).reason == RejectReason::multiple_leading);
    }
    SUBCASE("tied candidate cycles") {
        System sys = loops({mat2(2, 0, 0, 1), mat2(2, 0, 0, 0.5)});
        auto cand = find_candidate_smp(sys, 3);
        REQUIRE(cand->tie);
        auto out = run_invariant_polytope(sys, *cand);
        REQUIRE(std::holds_alternative<Rejected>(out));
        CHECK(std::get<Rejected>(out).reason == RejectReason::tie);
    }
    SUBCASE("cone mode needs a strictly positive leading eigenvector") {
        System sys = loops({mat2(1.1, 0, 0, 0.5)});
        auto cand = find_candidate_smp(sys, 3);
        AlgorithmOptions opt;
        opt.cone_mode = true;
        auto out = run_invariant_polytope(sys, *cand, opt);
        REQUIRE(std::holds_alternative<Rejected>(out));
        CHECK(std::get<Rejected>(out).reason == RejectReason::degenerate_perron);
    }
}

TEST_CASE("cone mode rejects systems with negative entries") {
    System sys = load_system_file(fixture("ex2.json"));
    auto cand = find_candidate_smp(sys, 10);
    AlgorithmOptions opt;
    opt.cone_mode = true;
    CHECK_THROWS_AS(run_invariant_polytope(sys, *cand, opt), Error);
}

TEST_CASE("reducible input surfaces an invariant family") {
    System sys = loops({mat2(2, 1, 0, 1), mat2(1, 1, 0, 1.5)});
    auto cand = find_candidate_smp(sys, 6);
    REQUIRE(cand.has_value());
    CHECK_FALSE(cand->tie);
    auto out = run_invariant_polytope(sys, *cand);
    REQUIRE(std::holds_alternative<ReducibilityWitness>(out));
    const auto& fam = std::get<ReducibilityWitness>(out).family;
    CHECK(fam.bases.size() == 1);
    CHECK(fam.bases[0].cols() == 1);
}

TEST_CASE("the engine is deterministic across worker counts") {
    System sys = load_system_file(fixture("ex2.json"));
    auto cand = find_candidate_smp(sys, 10);
    std::vector<double> rhos;
    std::vector<std::vector<std::size_t>> sizes;
    for (const char* threads : {"1", "3", "8"}) {
        setenv("CJSR_THREADS", threads, 1);
        auto res = expect_converged(run_invariant_polytope(sys, *cand));
        rhos.push_back(res.rho);
        sizes.push_back(cert_sizes(res));
    }
    unsetenv("CJSR_THREADS");
    CHECK(rhos[0] == rhos[1]);
    CHECK(rhos[0] == rhos[2]);
    CHECK(sizes[0] == sizes[1]);
    CHECK(sizes[0] == sizes[2]);
}

TEST_CASE("max_iter zero reports an honest bracket") {
    System sys = load_system_file(fixture("ex2.json"));
    auto cand = find_candidate_smp(sys, 10);
    AlgorithmOptions opt;
    opt.max_iter = 0;
    auto out = run_invariant_polytope(sys, *cand, opt);
    REQUIRE(std::holds_alternative<Bracket>(out));
    const auto& br = std::get<Bracket>(out);
    CHECK(br.lower == doctest::Approx(cand->averaged_value).epsilon(1e-14));
    CHECK(br.upper >= br.lower);
    // the certified value of the full run sits inside
    CHECK(br.upper >= 1.4568457958169323 - 1e-9);
}
