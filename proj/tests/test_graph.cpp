#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"

#include "cjsr/error.hpp"
#include "cjsr/graph.hpp"
#include "cjsr/system.hpp"

using namespace cjsr;
using cjsr_test::fixture;
using cjsr_test::loops;
using cjsr_test::mat2;

namespace {

using IdSeq = std::vector<std::string>;

IdSeq ids_of(const System& sys, const Path& p) { return path_edge_ids(sys, p); }

IdSeq min_rotation(IdSeq seq) {
    IdSeq best = seq;
    for (std::size_t s = 1; s < seq.size(); ++s) {
        std::rotate(seq.begin(), seq.begin() + 1, seq.end());
        if (seq < best) best = seq;
    }
    return best;
}

bool is_power(const IdSeq& seq) {
    std::size_t n = seq.size();
    for (std::size_t p = 1; p <= n / 2; ++p) {
        if (n % p != 0) continue;
        bool periodic = true;
        for (std::size_t i = p; i < n && periodic; ++i) periodic = seq[i] == seq[i - p];
        if (periodic) return true;
    }
    return false;
}

// Blunt reference enumerator: every closed edge sequence by DFS, collapsed
// to rotation classes, powers removed.
std::set<IdSeq> reference_walks(const System& sys, int l0) {
    std::set<IdSeq> out;
    std::vector<int> seq;
    for (int start = 0; start < sys.vertex_count(); ++start) {
        auto dfs = [&](auto&& self, int at) -> void {
            if (static_cast<int>(seq.size()) == l0) return;
            for (int ei : sys.out[at]) {
                seq.push_back(ei);
                if (sys.edges[ei].to == start) {
                    IdSeq ids;
                    for (int e : seq) ids.push_back(sys.edges[e].id);
                    if (!is_power(ids)) out.insert(min_rotation(ids));
                }
                self(self, sys.edges[ei].to);
                seq.pop_back();
            }
        };
        dfs(dfs, start);
    }
    return out;
}

}  // namespace

TEST_CASE("scc components come out in cross-edge order") {
    Mat one = Mat::Identity(1, 1);
    System sys = build_system({{"a", 1}, {"b", 1}},
                              {{"e1", "a", "b", "M", one}});
    auto dec = strongly_connected_components(sys);
    REQUIRE(dec.components.size() == 2);
    CHECK(dec.components[0] == std::vector<int>{0});
    CHECK(dec.components[1] == std::vector<int>{1});
    CHECK(dec.subsystems[0].edge_count() == 0);  // the cross edge is dropped
    CHECK_FALSE(is_strongly_connected(sys));
}

TEST_CASE("scc on a condensation chain") {
    Mat one = Mat::Identity(1, 1);
    // two 2-cycles joined by a one-way bridge
    System sys = build_system(
        {{"p", 1}, {"q", 1}, {"r", 1}, {"s", 1}},
        {{"e1", "p", "q", "M", one},
         {"e2", "q", "p", "M", one},
         {"e3", "q", "r", "M", one},
         {"e4", "r", "s", "M", one},
         {"e5", "s", "r", "M", one}});
    auto dec = strongly_connected_components(sys);
    REQUIRE(dec.components.size() == 2);
    // every cross edge must go from an earlier component to a later one
    CHECK(dec.components[0] == std::vector<int>{0, 1});
    CHECK(dec.components[1] == std::vector<int>{2, 3});
    CHECK(dec.subsystems[0].edge_count() == 2);
    CHECK(dec.subsystems[1].edge_count() == 2);
    CHECK(is_strongly_connected(dec.subsystems[0]));
}

TEST_CASE("ex2 and ex3 are strongly connected") {
    CHECK(is_strongly_connected(load_system_file(fixture("ex2.json"))));
    CHECK(is_strongly_connected(load_system_file(fixture("ex3.json"))));
}

TEST_CASE("closed walk enumeration counts on two loops") {
    System sys = loops({mat2(1, 0, 0, 1), mat2(0, 1, 1, 0)});
    // primitive necklaces over a 2-letter alphabet: 2 + 1 + 2 at lengths 1..3
    CHECK(enumerate_closed_walks(sys, 1).size() == 2);
    CHECK(enumerate_closed_walks(sys, 2).size() == 3);
    CHECK(enumerate_closed_walks(sys, 3).size() == 5);
    for (const auto& w : enumerate_closed_walks(sys, 3)) {
        auto ids = ids_of(sys, w);
        CHECK(ids == min_rotation(ids));
        CHECK_FALSE(is_power(ids));
    }
}

TEST_CASE("closed walk enumeration matches the reference scan") {
    for (const char* name : {"ex2.json", "ex3.json"}) {
        CAPTURE(name);
        System sys = load_system_file(fixture(name));
        auto want = reference_walks(sys, 4);
        auto got = enumerate_closed_walks(sys, 4);
        std::set<IdSeq> got_set;
        for (const auto& w : got) {
            CHECK(path_closed(sys, w));
            auto ids = ids_of(sys, w);
            CHECK(ids == min_rotation(ids));
            got_set.insert(ids);
        }
        CHECK(got_set.size() == got.size());  // no rotation class twice
        CHECK(got_set == want);
    }
}

TEST_CASE("walk enumeration honors its cap") {
    System sys = load_system_file(fixture("ex2.json"));
    CHECK_THROWS_AS(enumerate_closed_walks(sys, 8, 5), CapError);
}

TEST_CASE("vertex identification merges equal outgoing structure") {
    Mat a = mat2(1, 1, 0, 1);
    Mat b = mat2(0, 1, 1, 0);
    // u and v both send a to t and b to themselves; they are interchangeable
    System sys = build_system({{"u", 2}, {"v", 2}, {"t", 2}},
                              {{"e1", "u", "t", "A", a},
                               {"e2", "v", "t", "A", a},
                               {"e3", "u", "u", "B", b},
                               {"e4", "v", "v", "B", b},
                               {"e5", "t", "u", "A", a},
                               {"e6", "t", "v", "A", a}});
    System merged = identify_vertices(sys);
    CHECK(merged.vertex_count() == 2);
    CHECK(merged.edge_count() == 4);

    // distinct matrices must block the merge
    Mat c = mat2(1, 1, 0, 2);
    System apart = build_system({{"u", 2}, {"v", 2}},
                                {{"e1", "u", "v", "A", a}, {"e2", "v", "u", "C", c}});
    CHECK(identify_vertices(apart).vertex_count() == 2);
}

TEST_CASE("identification preserves the walk product bracket") {
    System sys = build_system({{"u", 2}, {"v", 2}},
                              {{"e1", "u", "v", "A", mat2(0.3, 1, 0, 0.8)},
                               {"e2", "v", "u", "A", mat2(0.3, 1, 0, 0.8)},
                               {"e3", "u", "u", "B", mat2(0, 0.9, 0.9, 0)},
                               {"e4", "v", "v", "B", mat2(0, 0.9, 0.9, 0)}});
    System merged = identify_vertices(sys);
    REQUIRE(merged.vertex_count() == 1);
    auto b1 = brute_force_bounds(sys, 5);
    auto b2 = brute_force_bounds(merged, 5);
    CHECK(b1.lower == doctest::Approx(b2.lower).epsilon(1e-12));
    CHECK(b1.upper == doctest::Approx(b2.upper).epsilon(1e-12));
}
