#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cjsr/barabanov.hpp"
#include "cjsr/bdf.hpp"
#include "cjsr/compilers.hpp"
#include "cjsr/error.hpp"
#include "cjsr/graph.hpp"
#include "cjsr/ipa.hpp"
#include "cjsr/lsr.hpp"
#include "cjsr/pipeline.hpp"
#include "cjsr/polytope.hpp"
#include "cjsr/report.hpp"
#include "cjsr/smp.hpp"
#include "cjsr/system.hpp"
#include "cjsr/util.hpp"

using nlohmann::json;
using namespace cjsr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitBracket = 2;

struct Common {
    double tol = 1e-10;
    int max_iter = 40;
    int l0 = 10;
    bool cone = false;
    std::uint64_t seed = 12345;
    std::string out;
    std::string format = "text";
};

void add_common(CLI::App* cmd, Common& c, bool with_cone) {
    cmd->add_option("--tol", c.tol, "membership tolerance");
    cmd->add_option("--max-iter", c.max_iter, "round cap of the polytope iteration");
    cmd->add_option("--max-cycle-len", c.l0, "closed walk search depth");
    if (with_cone) cmd->add_flag("--cone", c.cone, "nonnegative cone variant");
    cmd->add_option("--seed", c.seed, "seed for randomized probes");
    cmd->add_option("--out", c.out, "write the result artifact to this file");
    cmd->add_option("--format", c.format, "report format")
        ->check(CLI::IsMember({"text", "machine"}));
}

AlgorithmOptions algo_of(const Common& c) {
    AlgorithmOptions a;
    a.tol = c.tol;
    a.max_iter = c.max_iter;
    a.cone_mode = c.cone;
    return a;
}

std::string input_hash(const std::string& bytes) {
    return "fnv1a64:" + hex64(fnv1a64(bytes.data(), bytes.size()));
}

json options_json(const Common& c) {
    return {{"tol", c.tol},
            {"max_iter", c.max_iter},
            {"max_cycle_len", c.l0},
            {"cone", c.cone},
            {"seed", c.seed}};
}

void emit_machine(const json& j) { std::cout << dump_json_canonical(j) << "\n"; }

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        auto d = std::chrono::steady_clock::now() - start_;
        return std::chrono::duration<double, std::milli>(d).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

json certificate_json(const System& sys, const Converged& c) {
    json pol = json::array();
    for (int i = 0; i < sys.vertex_count(); ++i) {
        json coords = json::array();
        for (const auto& cv : c.certificate.vertices[i]) coords.push_back(vector_to_json(cv.coords));
        pol.push_back({{"vertex_id", sys.vertices[i].id}, {"coords", coords}});
    }
    return {{"rho", c.rho}, {"kind", body_kind_name(c.certificate.kind)}, {"polytopes", pol}};
}

json multinorm_json(const System& sys, const BarabanovMultinorm& mn) {
    json pol = json::array();
    for (int i = 0; i < sys.vertex_count(); ++i) {
        json coords = json::array();
        for (const auto& u : mn.generators[i]) coords.push_back(vector_to_json(u));
        pol.push_back({{"vertex_id", sys.vertices[i].id}, {"coords", coords}});
    }
    return {{"rho", mn.rho}, {"kind", mn.kind}, {"polytopes", pol}};
}

void print_tree(const json& node, int indent) {
    std::string pad(static_cast<size_t>(indent) * 2, ' ');
    const std::string type = node.value("type", "?");
    if (type == "leaf") {
        const std::string outcome = node.value("outcome", "?");
        if (outcome == "converged") {
            std::cout << pad << "converged: rho = " << fmt_g17(node["rho"].get<double>())
                      << ", iterations = " << node["iterations"].get<int>()
                      << ", dominance = " << fmt_g17(node["dominance"].get<double>()) << "\n";
            std::cout << pad << "  candidate walk:";
            for (const auto& id : node["smp"]["edges"]) std::cout << " " << id.get<std::string>();
            std::cout << "\n" << pad << "  polytope sizes:";
            for (const auto& s : node["polytope_sizes"]) std::cout << " " << s.get<int>();
            std::cout << "\n";
        } else if (outcome == "bracket") {
            std::cout << pad << "bracket: [" << fmt_g17(node["lower"].get<double>()) << ", "
                      << fmt_g17(node["upper"].get<double>()) << "]\n";
        } else if (outcome == "rejected") {
            std::cout << pad << "candidate rejected (" << node["reason"].get<std::string>()
                      << "): " << node["detail"].get<std::string>() << "\n";
            std::cout << pad << "  bounds: [" << fmt_g17(node["lower"].get<double>()) << ", "
                      << fmt_g17(node["upper"].get<double>()) << "]\n";
        } else {
            std::cout << pad << "no closed walks: rho = 0\n";
        }
    } else if (type == "scc_split") {
        std::cout << pad << "strongly connected components:\n";
        for (const auto& comp : node["components"]) {
            std::cout << pad << "- vertices:";
            for (const auto& id : comp["vertices"]) std::cout << " " << id.get<std::string>();
            std::cout << "\n";
            print_tree(comp["analysis"], indent + 1);
        }
    } else if (type == "factor") {
        std::cout << pad << "invariant family found, dims:";
        for (const auto& d : node["family_dims"]) std::cout << " " << d.get<int>();
        std::cout << "\n" << pad << "restriction:\n";
        print_tree(node["restriction"], indent + 1);
        std::cout << pad << "quotient:\n";
        print_tree(node["quotient"], indent + 1);
    }
}

int cmd_analyze(const std::string& path, const Common& c) {
    Timer timer;
    std::string bytes = read_file(path);
    System sys = load_system(bytes);
    SccDecomposition scc = strongly_connected_components(sys);
    std::optional<SmpCandidate> cand;
    double qhat = 0.0;
    bool sc = is_strongly_connected(sys);
    if (sc) {
        cand = find_candidate_smp(sys, c.l0);
        if (cand) qhat = check_dominance(sys, *cand, c.l0);
    }
    if (c.format == "machine") {
        json comps = json::array();
        for (const auto& comp : scc.components) {
            json ids = json::array();
            for (int v : comp) ids.push_back(sys.vertices[v].id);
            comps.push_back(ids);
        }
        json dims = json::array();
        for (const auto& v : sys.vertices) dims.push_back(v.dim);
        json j = {{"command", "analyze"},
                  {"input_hash", input_hash(bytes)},
                  {"options", options_json(c)},
                  {"vertices", sys.vertex_count()},
                  {"edges", sys.edge_count()},
                  {"dims", dims},
                  {"nonnegative", sys.nonnegative()},
                  {"strongly_connected", sc},
                  {"components", comps}};
        if (cand) {
            j["candidate"] = {{"edges", path_edge_ids(sys, cand->cycle)},
                              {"value", cand->averaged_value},
                              {"leading_class", leading_class_name(cand->leading_class)},
                              {"tie", cand->tie}};
            j["dominance"] = qhat;
        }
        emit_machine(j);
        return kExitOk;
    }
    std::cout << "system: " << sys.vertex_count() << " vertices, " << sys.edge_count()
              << " edges\n";
    std::cout << "dims:";
    for (const auto& v : sys.vertices) std::cout << " " << v.id << ":" << v.dim;
    std::cout << "\nnonnegative: " << (sys.nonnegative() ? "yes" : "no") << "\n";
    std::cout << "strongly connected: " << (sc ? "yes" : "no") << " (" << scc.components.size()
              << " components)\n";
    if (cand) {
        std::cout << "candidate walk:";
        for (const auto& id : path_edge_ids(sys, cand->cycle)) std::cout << " " << id;
        std::cout << "\ncandidate value: " << fmt_g17(cand->averaged_value) << "\n";
        std::cout << "leading class: " << leading_class_name(cand->leading_class)
                  << (cand->tie ? " (tied)" : "") << "\n";
        std::cout << "dominance: " << fmt_g17(qhat) << "\n";
    }
    std::cout << "wall time: " << timer.ms() << " ms\n";
    return kExitOk;
}

// The constraint file lists modes as an object keyed A1..Am.
std::vector<Mat> parse_matrices(const json& j) {
    if (!j.is_object() || j.empty()) throw SchemaError("matrices must be a nonempty object");
    int m = static_cast<int>(j.size());
    std::vector<json> ordered(m);
    for (const auto& [key, value] : j.items()) {
        if (key.size() < 2 || key[0] != 'A')
            throw SchemaError("matrix keys must be A1..A" + std::to_string(m));
        int idx = 0;
        for (std::size_t p = 1; p < key.size(); ++p) {
            if (!std::isdigit(static_cast<unsigned char>(key[p])))
                throw SchemaError("matrix keys must be A1..A" + std::to_string(m));
            idx = idx * 10 + (key[p] - '0');
        }
        if (idx < 1 || idx > m || !ordered[idx - 1].is_null())
            throw SchemaError("matrix keys must be A1..A" + std::to_string(m) +
                              " with no gaps or repeats");
        ordered[idx - 1] = value;
    }
    std::vector<Mat> out;
    for (const auto& mj : ordered) {
        if (!mj.is_array() || mj.empty()) throw SchemaError("each matrix must be a row array");
        int rows = static_cast<int>(mj.size());
        int cols = -1;
        for (const auto& row : mj) {
            if (!row.is_array()) throw SchemaError("matrix rows must be arrays");
            if (cols < 0) cols = static_cast<int>(row.size());
            if (static_cast<int>(row.size()) != cols)
                throw SchemaError("matrix rows must have equal length");
        }
        Mat m(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int cidx = 0; cidx < cols; ++cidx) {
                const auto& cell = mj[r][cidx];
                if (!cell.is_number()) throw SchemaError("matrix entries must be numbers");
                m(r, cidx) = cell.get<double>();
            }
        out.push_back(m);
    }
    return out;
}

int cmd_compile(const std::string& path, const Common& c) {
    Timer timer;
    std::string bytes = read_file(path);
    json j = json::parse(bytes);
    if (!j.is_object()) throw SchemaError("the compile input must be a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "matrices" && key != "forbidden_pairs" && key != "forbidden_words")
            throw SchemaError("unknown key '" + key + "' in compile input");
    }
    if (!j.contains("matrices")) throw SchemaError("compile input needs a 'matrices' object");
    if (j.contains("forbidden_pairs") && j.contains("forbidden_words"))
        throw SchemaError("give either forbidden_pairs or forbidden_words, not both");
    std::vector<Mat> modes = parse_matrices(j.at("matrices"));
    System sys;
    std::string kind;
    if (j.contains("forbidden_words")) {
        kind = "forbidden_words";
        std::vector<std::vector<int>> words;
        for (const auto& w : j.at("forbidden_words")) {
            if (!w.is_string()) throw SchemaError("each forbidden word must be a digit string");
            std::vector<int> digits;
            for (char ch : w.get<std::string>()) {
                if (!std::isdigit(static_cast<unsigned char>(ch)) || ch == '0')
                    throw SchemaError("forbidden words use mode digits 1..9");
                digits.push_back(ch - '0');
            }
            words.push_back(digits);
        }
        sys = compile_forbidden_words(modes, words);
    } else {
        // Pairs, possibly none at all: the unconstrained Markov graph.
        kind = "markovian";
        std::vector<std::pair<int, int>> forb;
        for (const auto& p : j.value("forbidden_pairs", json::array())) {
            if (!p.is_array() || p.size() != 2) throw SchemaError("forbidden pairs need two modes");
            forb.emplace_back(p[0].get<int>(), p[1].get<int>());
        }
        sys = compile_markovian(modes, forb);
    }
    if (!c.out.empty()) save_system_file(sys, c.out);
    if (c.format == "machine") {
        json r = {{"command", "compile"},
                  {"input_hash", input_hash(bytes)},
                  {"kind", kind},
                  {"vertices", sys.vertex_count()},
                  {"edges", sys.edge_count()},
                  {"system", system_to_json(sys)}};
        emit_machine(r);
        return kExitOk;
    }
    std::cout << "compiled " << kind << ": " << sys.vertex_count() << " vertices, "
              << sys.edge_count() << " edges\n";
    if (!c.out.empty())
        std::cout << "written to " << c.out << "\n";
    else
        std::cout << save_system(sys);
    std::cout << "wall time: " << timer.ms() << " ms\n";
    return kExitOk;
}

int cmd_jsr(const std::string& path, const Common& c, const std::vector<std::string>& cand_edges) {
    Timer timer;
    std::string bytes = read_file(path);
    System sys = load_system(bytes);
    PipelineOptions po;
    po.algo = algo_of(c);
    po.l0 = c.l0;
    po.seed = c.seed;
    po.candidate_edges = cand_edges;
    JsrSummary sum = compute_jsr(sys, po);
    int code = sum.certified ? kExitOk : kExitBracket;
    if (!c.out.empty()) {
        if (sum.whole_certificate) {
            write_file(c.out, dump_json_canonical(certificate_json(sys, *sum.whole_certificate)) +
                                  "\n");
        } else {
            json j = {{"note", "no single-block certificate; decomposition tree instead"},
                      {"certified", sum.certified},
                      {"lower", sum.lower},
                      {"upper", sum.upper},
                      {"tree", sum.tree}};
            write_file(c.out, dump_json_canonical(j) + "\n");
        }
    }
    if (c.format == "machine") {
        json j = {{"command", "jsr"},
                  {"input_hash", input_hash(bytes)},
                  {"options", options_json(c)},
                  {"certified", sum.certified},
                  {"lower", sum.lower},
                  {"upper", sum.upper},
                  {"exit", code},
                  {"tree", sum.tree}};
        if (sum.certified) j["rho"] = sum.upper;
        emit_machine(j);
        return code;
    }
    if (sum.certified)
        std::cout << "rho = " << fmt_g17(sum.upper) << " (certified)\n";
    else
        std::cout << "rho in [" << fmt_g17(sum.lower) << ", " << fmt_g17(sum.upper)
                  << "] (not certified)\n";
    print_tree(sum.tree, 0);
    if (!c.out.empty()) std::cout << "artifact written to " << c.out << "\n";
    std::cout << "wall time: " << timer.ms() << " ms\n";
    return code;
}

int cmd_lsr(const std::string& path, const Common& c) {
    Timer timer;
    std::string bytes = read_file(path);
    System sys = load_system(bytes);
    AlgorithmOptions algo = algo_of(c);
    auto cand = find_candidate_smp_min(sys, c.l0);
    std::optional<JsrOutcome> out;
    if (cand) out = run_lsr_polytope(sys, *cand, algo);
    StabilizabilityReport rep = stabilizability_verdict(sys, cand, out ? &*out : nullptr, c.l0);
    int code = rep.verdict == "unknown" ? kExitBracket : kExitOk;
    const Converged* conv = out ? std::get_if<Converged>(&*out) : nullptr;
    if (!c.out.empty() && conv)
        write_file(c.out, dump_json_canonical(certificate_json(sys, *conv)) + "\n");
    if (c.format == "machine") {
        json j = {{"command", "lsr"},
                  {"input_hash", input_hash(bytes)},
                  {"options", options_json(c)},
                  {"verdict", rep.verdict},
                  {"lower", rep.lower},
                  {"upper", rep.upper},
                  {"note", rep.note},
                  {"exit", code}};
        if (cand)
            j["candidate"] = {{"edges", path_edge_ids(sys, cand->cycle)},
                              {"value", cand->averaged_value}};
        if (conv) {
            j["rho"] = conv->rho;
            j["iterations"] = conv->iterations;
        }
        emit_machine(j);
        return code;
    }
    if (conv) std::cout << "lower spectral radius = " << fmt_g17(conv->rho) << " (certified)\n";
    else
        std::cout << "lower spectral radius in [" << fmt_g17(rep.lower) << ", "
                  << fmt_g17(rep.upper) << "]\n";
    std::cout << "stabilizable: " << rep.verdict << " (" << rep.note << ")\n";
    if (!c.out.empty() && conv) std::cout << "certificate written to " << c.out << "\n";
    std::cout << "wall time: " << timer.ms() << " ms\n";
    return code;
}

int cmd_barabanov(const std::string& path, const Common& c, int samples) {
    Timer timer;
    std::string bytes = read_file(path);
    System sys = load_system(bytes);
    auto primal_cand = find_candidate_smp(sys, c.l0);
    if (!primal_cand) {
        if (c.format == "machine") {
            emit_machine({{"command", "barabanov"},
                          {"input_hash", input_hash(bytes)},
                          {"options", options_json(c)},
                          {"rho", 0.0},
                          {"note", "no closed walks"},
                          {"exit", kExitOk}});
        } else {
            std::cout << "no closed walks: rho = 0, no multinorm\n";
            std::cout << "wall time: " << timer.ms() << " ms\n";
        }
        return kExitOk;
    }
    BarabanovResult res = barabanov_multinorm(sys, algo_of(c), c.l0);
    if (!res.multinorm) {
        json detail;
        int code = kExitBracket;
        if (const auto* b = std::get_if<Bracket>(&res.outcome))
            detail = {{"lower", b->lower}, {"upper", b->upper}};
        else if (const auto* r = std::get_if<Rejected>(&res.outcome))
            detail = {{"reason", reject_reason_name(r->reason)}, {"detail", r->detail}};
        else
            detail = {{"reason", "invariant family on the dual"}};
        if (c.format == "machine") {
            emit_machine({{"command", "barabanov"},
                          {"input_hash", input_hash(bytes)},
                          {"options", options_json(c)},
                          {"converged", false},
                          {"detail", detail},
                          {"exit", code}});
        } else {
            std::cout << "dual run did not converge; no multinorm\n" << detail.dump(2) << "\n";
            std::cout << "wall time: " << timer.ms() << " ms\n";
        }
        return code;
    }
    const BarabanovMultinorm& mn = *res.multinorm;
    double residual = verify_invariance(sys, mn, samples, c.seed);
    if (!c.out.empty())
        write_file(c.out, dump_json_canonical(multinorm_json(sys, mn)) + "\n");
    if (c.format == "machine") {
        json sizes = json::array();
        for (const auto& g : mn.generators) sizes.push_back(g.size());
        emit_machine({{"command", "barabanov"},
                      {"input_hash", input_hash(bytes)},
                      {"options", options_json(c)},
                      {"converged", true},
                      {"rho", mn.rho},
                      {"kind", mn.kind},
                      {"generators_per_vertex", sizes},
                      {"residual", residual},
                      {"exit", kExitOk}});
        return kExitOk;
    }
    std::cout << "rho = " << fmt_g17(mn.rho) << " (from the dual certificate)\n";
    std::cout << "generators per vertex:";
    for (const auto& g : mn.generators) std::cout << " " << g.size();
    std::cout << "\ninvariance residual: " << fmt_g17(residual) << "\n";
    if (!c.out.empty()) std::cout << "multinorm written to " << c.out << "\n";
    std::cout << "wall time: " << timer.ms() << " ms\n";
    return kExitOk;
}

int cmd_bdf(int order, const std::vector<double>& ratios, double tmin, double tmax, double tstep,
            const Common& c) {
    Timer timer;
    BdfBuild build = build_bdf_system(order, ratios);
    std::optional<ThetaSweep> sweep;
    if (tstep > 0) {
        if (tmax <= tmin) throw SchemaError("theta sweep needs theta-min < theta-max");
        int tsteps = static_cast<int>(std::lround((tmax - tmin) / tstep)) + 1;
        if (tsteps < 2) tsteps = 2;
        sweep = theta_sweep(order, tmin, tmax, tsteps);
    }
    if (!c.out.empty()) save_system_file(build.merged, c.out);
    json jratios = json::array();
    for (double r : ratios) jratios.push_back(r);
    if (c.format == "machine") {
        json j = {{"command", "bdf"},
                  {"order", order},
                  {"ratios", jratios},
                  {"vertices_full", build.full.vertex_count()},
                  {"edges_full", build.full.edge_count()},
                  {"vertices_merged", build.merged.vertex_count()},
                  {"edges_merged", build.merged.edge_count()}};
        std::string key = dump_json_canonical(j);
        j["input_hash"] = input_hash(key);
        j["options"] = options_json(c);
        if (sweep) {
            json rows = json::array();
            for (const auto& row : sweep->rows) rows.push_back({{"theta", row.theta}, {"rho", row.rho}});
            json sj = {{"rows", rows}, {"note", sweep->note}};
            if (sweep->crossing) sj["crossing"] = *sweep->crossing;
            j["sweep"] = sj;
        }
        emit_machine(j);
        return kExitOk;
    }
    std::cout << "stepsize ratio system, order " << order << ": " << build.full.vertex_count()
              << " -> " << build.merged.vertex_count() << " vertices after identification ("
              << build.merged.edge_count() << " edges)\n";
    if (sweep) {
        for (const auto& row : sweep->rows)
            std::cout << "theta " << fmt_g17(row.theta) << "  rho " << fmt_g17(row.rho) << "\n";
        if (sweep->crossing)
            std::cout << "rho crosses 1 near theta = " << fmt_g17(*sweep->crossing) << "\n";
        if (!sweep->note.empty()) std::cout << "note: " << sweep->note << "\n";
    }
    if (!c.out.empty()) std::cout << "system written to " << c.out << "\n";
    std::cout << "wall time: " << timer.ms() << " ms\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"constrained joint and lower spectral radius toolkit"};
    app.require_subcommand(1);

    Common ca, cc, cj, cl, cb, cd;
    std::string in_analyze, in_compile, in_jsr, in_lsr, in_barabanov;
    std::vector<std::string> cand_edges;
    int samples = 32;
    int order = 3;
    std::vector<double> ratios;
    double tmin = 1.0, tmax = 2.0;
    double tstep = 0.0;

    CLI::App* analyze = app.add_subcommand("analyze", "inspect a system file");
    analyze->add_option("input", in_analyze, "system JSON file")->required();
    add_common(analyze, ca, false);

    CLI::App* compile = app.add_subcommand("compile", "build a system from switching constraints");
    compile->add_option("input", in_compile, "constraint JSON file")->required();
    add_common(compile, cc, false);

    CLI::App* jsr = app.add_subcommand("jsr", "joint spectral radius with certificates");
    jsr->add_option("input", in_jsr, "system JSON file")->required();
    jsr->add_option("--candidate", cand_edges, "edge ids of a manual candidate walk");
    add_common(jsr, cj, true);

    CLI::App* lsr = app.add_subcommand("lsr", "lower spectral radius of a nonnegative system");
    lsr->add_option("input", in_lsr, "system JSON file")->required();
    add_common(lsr, cl, false);

    CLI::App* barabanov = app.add_subcommand("barabanov", "extremal multinorm from the dual");
    barabanov->add_option("input", in_barabanov, "system JSON file")->required();
    barabanov->add_option("--samples", samples, "random probes per vertex");
    add_common(barabanov, cb, false);
    cb.seed = 0;

    CLI::App* bdf = app.add_subcommand("bdf", "variable stepsize multistep systems");
    bdf->add_option("--steps", order, "formula steps, 3 or 4")->required();
    bdf->add_option("--ratios", ratios, "stepsize ratio grid")->required()->expected(-1);
    bdf->add_option("--theta-min", tmin, "sweep start");
    bdf->add_option("--theta-max", tmax, "sweep end");
    bdf->add_option("--theta-step", tstep, "sweep spacing, 0 disables the sweep");
    add_common(bdf, cd, false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*analyze) return cmd_analyze(in_analyze, ca);
        if (*compile) return cmd_compile(in_compile, cc);
        if (*jsr) return cmd_jsr(in_jsr, cj, cand_edges);
        if (*lsr) return cmd_lsr(in_lsr, cl);
        if (*barabanov) return cmd_barabanov(in_barabanov, cb, samples);
        if (*bdf) return cmd_bdf(order, ratios, tmin, tmax, tstep, cd);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
