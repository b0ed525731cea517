#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "doctest.h"
#include "helpers.hpp"

#include "cjsr/error.hpp"
#include "cjsr/system.hpp"
#include "cjsr/util.hpp"

using namespace cjsr;
using cjsr_test::fixture;
using cjsr_test::loops;
using cjsr_test::mat2;

TEST_CASE("save/load round trip is byte stable") {
    System sys = load_system_file(fixture("ex2.json"));
    std::string once = save_system(sys);
    System again = load_system(once);
    CHECK(save_system(again) == once);
    CHECK(again.vertex_count() == 3);
    CHECK(again.edge_count() == 8);
    // edge order is part of the document
    CHECK(again.edges[0].id == "e1");
    CHECK(again.edges[7].id == "e8");
    CHECK(again.edges[7].label == "A4");
}

TEST_CASE("loader rejects malformed documents") {
    CHECK_THROWS_AS(load_system("not json at all"), SchemaError);
    CHECK_THROWS_AS(load_system("[1,2,3]"), SchemaError);
    CHECK_THROWS_AS(load_system(R"({"vertices": []})"), SchemaError);
    // unknown keys anywhere are an error, not a warning
    CHECK_THROWS_AS(load_system(R"({"vertices": [{"id":"1","dim":1}], "edges": [], "extra": 1})"),
                    SchemaError);
    CHECK_THROWS_AS(
        load_system(
            R"({"vertices": [{"id":"1","dim":1,"color":"red"}], "edges": []})"),
        SchemaError);
    CHECK_THROWS_AS(
        load_system(
            R"({"vertices": [{"id":"1","dim":1}],
                "edges": [{"id":"e1","from":"1","to":"1","label":"A","matrix":[[1]],"w":2}]})"),
        SchemaError);
}

TEST_CASE("build_system validates shapes and references") {
    Mat ok = mat2(1, 0, 0, 1);
    Mat wide(1, 2);
    wide << 1, 0;

    CHECK_THROWS_AS(build_system({{"1", 2}, {"1", 2}}, {}), SchemaError);
    CHECK_THROWS_AS(build_system({{"1", 0}}, {}), SchemaError);
    CHECK_THROWS_AS(build_system({{"1", 2}}, {{"e1", "1", "ghost", "A", ok}}), SchemaError);
    // matrix must be dim(to) x dim(from)
    CHECK_THROWS_AS(build_system({{"1", 2}}, {{"e1", "1", "1", "A", wide}}), SchemaError);
    System mixed = build_system({{"1", 2}, {"2", 1}}, {{"e1", "1", "2", "A", wide}});
    CHECK(mixed.edges[0].m.rows() == 1);
    CHECK(mixed.edges[0].m.cols() == 2);
    Mat inf2 = ok;
    inf2(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(build_system({{"1", 2}}, {{"e1", "1", "1", "A", inf2}}), SchemaError);
}

TEST_CASE("products compose right to left") {
    Mat a = mat2(1, 1, 0, 1);
    Mat b = mat2(1, 0, 2, 1);
    System sys = loops({a, b});
    Path p{{0, 1}, -1};  // first e1, then e2
    Mat want = b * a;
    CHECK((product_along_path(sys, p) - want).norm() == 0.0);
    CHECK(path_start(sys, p) == 0);
    CHECK(path_end(sys, p) == 0);
    CHECK(path_closed(sys, p));
}

TEST_CASE("paths across mixed dimensions") {
    System sys = load_system_file(fixture("ex3.json"));
    // e6: 3 -> 2 (dim 1), e4: 2 -> 1 (dim 2)
    Path p{{sys.edge_index("e6"), sys.edge_index("e4")}, -1};
    Mat prod = product_along_path(sys, p);
    CHECK(prod.rows() == 2);
    CHECK(prod.cols() == 2);
    Mat want = sys.edges[sys.edge_index("e4")].m * sys.edges[sys.edge_index("e6")].m;
    CHECK((prod - want).norm() == 0.0);
    CHECK_FALSE(path_closed(sys, p));

    Path empty{{}, 1};
    Mat id = product_along_path(sys, empty);
    CHECK(id.rows() == 1);
    CHECK((id - Mat::Identity(1, 1)).norm() == 0.0);
}

TEST_CASE("operator norm and spectral radius against Eigen") {
    Rng rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        int n = 2 + static_cast<int>(rng.below(4));
        Mat m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = rng.normal();
        Eigen::JacobiSVD<Mat> svd(m);
        CHECK(operator_norm(m) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-12));
        double want = m.eigenvalues().cwiseAbs().maxCoeff();
        CHECK(spectral_radius(m) == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("brute force bracket basics") {
    SUBCASE("single scalar mode is exact at every depth") {
        Mat m(1, 1);
        m << 2.0;
        System sys = loops({m});
        for (int k = 1; k <= 4; ++k) {
            auto b = brute_force_bounds(sys, k);
            CHECK(b.lower == doctest::Approx(2.0).epsilon(1e-15));
            CHECK(b.upper == doctest::Approx(2.0).epsilon(1e-15));
        }
    }
    SUBCASE("rotation has radius one but norm one too") {
        double c = std::cos(1.0), s = std::sin(1.0);
        System sys = loops({mat2(c, -s, s, c)});
        auto b = brute_force_bounds(sys, 3);
        CHECK(b.lower == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(b.upper == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("bracket tightens with depth and stays ordered") {
        System sys = load_system_file(fixture("ex2.json"));
        double prev_lo = 0.0, prev_up = std::numeric_limits<double>::infinity();
        for (int k = 1; k <= 5; ++k) {
            auto b = brute_force_bounds(sys, k);
            CHECK(b.lower <= b.upper + 1e-12);
            CHECK(b.lower >= prev_lo - 1e-12);
            CHECK(b.upper <= prev_up + 1e-12);
            prev_lo = b.lower;
            prev_up = b.upper;
        }
        // the known value sits inside every bracket
        auto b5 = brute_force_bounds(sys, 5);
        CHECK(b5.lower <= 1.4568457958169323);
        CHECK(b5.upper >= 1.4568457958169323);
    }
    SUBCASE("minimizing variant brackets the smallest growth") {
        System sys = loops({mat2(0.5, 0, 0, 2.0), mat2(2.0, 0, 0, 0.5)});
        auto b = brute_force_min_bounds(sys, 4);
        CHECK(b.lower <= b.upper + 1e-12);
        // the alternating product is the identity, so the closed walk side reaches 1
        CHECK(b.upper <= 1.0 + 1e-12);
    }
}

TEST_CASE("enumeration caps throw instead of truncating") {
    System sys = load_system_file(fixture("ex2.json"));
    CHECK_THROWS_AS(brute_force_bounds(sys, 8, 10), CapError);
}

TEST_CASE("nonnegative flag") {
    System pos = loops({mat2(0.5, 0.1, 0.2, 0.3)});
    CHECK(pos.nonnegative());
    System neg = load_system_file(fixture("ex2.json"));
    CHECK_FALSE(neg.nonnegative());
}
