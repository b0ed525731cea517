#include <array>
#include <cstdio>
#include <fstream>
#include <string>

#include "doctest.h"
#include "helpers.hpp"

#include "json.hpp"

#include "cjsr/system.hpp"

using nlohmann::json;
using cjsr_test::fixture;
using cjsr_test::loops;
using cjsr_test::mat2;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

RunResult run_cli(const std::string& args, const std::string& env = "") {
    std::string cmd = env + (env.empty() ? "" : " ") + CJSR_CLI_PATH + " " + args + " 2>/dev/null";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::array<char, 4096> buf;
    std::size_t got;
    while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    f << text;
    REQUIRE(f.good());
}

}  // namespace

TEST_CASE("jsr certifies ex2 and reports machine fields") {
    auto r = run_cli("jsr " + fixture("ex2.json") + " --format machine");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("certified").get<bool>());
    CHECK(j.at("rho").get<double>() == 1.4568457958169323);
    CHECK(j.at("lower") == j.at("upper"));
    CHECK(j.at("exit").get<int>() == 0);
    CHECK(j.at("input_hash").get<std::string>().rfind("fnv1a64:", 0) == 0);
    CHECK_FALSE(j.contains("wall_ms"));
    CHECK(j.at("tree").at("outcome") == "converged");
}

TEST_CASE("machine reports are byte identical across worker counts") {
    std::string call = "jsr " + fixture("ex2.json") + " --format machine";
    auto one = run_cli(call, "CJSR_THREADS=1");
    auto two = run_cli(call, "CJSR_THREADS=2");
    auto eight = run_cli(call, "CJSR_THREADS=8");
    CHECK(one.code == 0);
    CHECK(one.out == two.out);
    CHECK(one.out == eight.out);
    CHECK_FALSE(one.out.empty());
}

TEST_CASE("text format reports the wall clock") {
    auto r = run_cli("jsr " + fixture("ex2.json"));
    CHECK(r.code == 0);
    CHECK(r.out.find("rho") != std::string::npos);
    CHECK(r.out.find("ms") != std::string::npos);
}

TEST_CASE("an exhausted iteration budget exits with the bracket code") {
    auto r = run_cli("jsr " + fixture("ex2.json") + " --max-iter 0 --format machine");
    CHECK(r.code == 2);
    json j = json::parse(r.out);
    CHECK_FALSE(j.at("certified").get<bool>());
    CHECK(j.at("lower").get<double>() <= j.at("upper").get<double>());
}

TEST_CASE("broken inputs exit with the error code") {
    CHECK(run_cli("jsr /tmp/cjsr_no_such_file.json").code == 1);
    write_text("/tmp/cjsr_bad.json", "{broken");
    CHECK(run_cli("jsr /tmp/cjsr_bad.json").code == 1);
    write_text("/tmp/cjsr_extra.json",
               R"({"vertices": [{"id":"1","dim":1}], "edges": [], "surprise": true})");
    CHECK(run_cli("jsr /tmp/cjsr_extra.json").code == 1);
    CHECK(run_cli("jsr").code != 0);
    CHECK(run_cli("frobnicate").code != 0);
}

TEST_CASE("jsr can write a standalone certificate") {
    auto r = run_cli("jsr " + fixture("ex2.json") + " --out /tmp/cjsr_cert.json --format machine");
    REQUIRE(r.code == 0);
    std::ifstream f("/tmp/cjsr_cert.json");
    REQUIRE(f.good());
    json cert = json::parse(f);
    CHECK(cert.at("kind") == "absco");
    CHECK(cert.at("rho").get<double>() == 1.4568457958169323);
    REQUIRE(cert.at("polytopes").size() == 3);
    int total = 0;
    for (const auto& p : cert.at("polytopes")) {
        CHECK(p.contains("vertex_id"));
        total += static_cast<int>(p.at("coords").size());
        for (const auto& c : p.at("coords")) CHECK(c.size() == 2);
    }
    CHECK(total == 14);
}

TEST_CASE("analyze surfaces the dominance diagnostic") {
    auto r = run_cli("analyze " + fixture("ex2.json") + " --format machine");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("strongly_connected").get<bool>());
    CHECK(j.at("dominance").get<double>() == doctest::Approx(0.9848607486270755).epsilon(1e-12));
}

TEST_CASE("compile reads the constraint schema") {
    write_text("/tmp/cjsr_fw.json",
               R"({"matrices": {"A1": [[1,1],[0,1]], "A2": [[1,0],[1,1]]},
                   "forbidden_words": ["121"]})");
    auto r = run_cli("compile /tmp/cjsr_fw.json --format machine --out /tmp/cjsr_fw_sys.json");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("kind") == "forbidden_words");
    CHECK(j.at("vertices").get<int>() == 4);
    CHECK(j.at("edges").get<int>() == 7);
    cjsr::System sys = cjsr::load_system_file("/tmp/cjsr_fw_sys.json");
    CHECK(sys.vertex_count() == 4);

    write_text("/tmp/cjsr_mk.json",
               R"({"matrices": {"A1": [[1,1],[0,1]], "A2": [[1,0],[1,1]]},
                   "forbidden_pairs": [[1, 2]]})");
    auto m = run_cli("compile /tmp/cjsr_mk.json --format machine");
    REQUIRE(m.code == 0);
    json mj = json::parse(m.out);
    CHECK(mj.at("kind") == "markovian");
    CHECK(mj.at("edges").get<int>() == 3);

    write_text("/tmp/cjsr_mixed.json",
               R"({"matrices": {"A1": [[1]]}, "forbidden_pairs": [], "forbidden_words": []})");
    CHECK(run_cli("compile /tmp/cjsr_mixed.json").code == 1);
    write_text("/tmp/cjsr_gap.json", R"({"matrices": {"A1": [[1]], "A3": [[1]]}})");
    CHECK(run_cli("compile /tmp/cjsr_gap.json").code == 1);
}

TEST_CASE("lsr decides the gentle pair from a file") {
    cjsr::System sys = loops({mat2(0.3, 0.2, 0.1, 0.4), mat2(0.5, 0.4, 0.3, 0.2)});
    cjsr::save_system_file(sys, "/tmp/cjsr_gentle.json");
    auto r = run_cli("lsr /tmp/cjsr_gentle.json --format machine");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("verdict") == "stabilizable");
    CHECK(j.at("lower").get<double>() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("barabanov reports the dual construction") {
    auto r = run_cli("barabanov " + fixture("ex2.json") + " --format machine");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("rho").get<double>() == doctest::Approx(1.4568457958169323).epsilon(1e-10));
    CHECK(j.at("residual").get<double>() <= 1e-8);
    CHECK(j.at("generators_per_vertex").size() == 3);
}

TEST_CASE("bdf builds grids and sweeps thresholds") {
    auto r = run_cli(
        "bdf --steps 3 --ratios 0.618 1.0 1.618 "
        "--theta-min 1.5 --theta-max 1.7 --theta-step 0.01 --format machine");
    REQUIRE(r.code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("vertices_full").get<int>() == 9);
    CHECK(j.at("vertices_merged").get<int>() == 3);
    double phi = 1.6180339887498949;
    CHECK(std::abs(j.at("sweep").at("crossing").get<double>() - phi) < 5e-3);
    CHECK(j.at("sweep").at("note").get<std::string>().find("complex") != std::string::npos);
    CHECK(run_cli("bdf --steps 6 --ratios 1.0").code == 1);
}
