#include "cjsr/system.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "json.hpp"

#include "cjsr/report.hpp"

namespace cjsr {

using nlohmann::json;

int System::vertex_index(const std::string& id) const {
    auto it = vindex_.find(id);
    if (it == vindex_.end()) throw SchemaError("unknown vertex id '" + id + "'");
    return it->second;
}

int System::edge_index(const std::string& id) const {
    auto it = eindex_.find(id);
    if (it == eindex_.end()) throw SchemaError("unknown edge id '" + id + "'");
    return it->second;
}

int System::total_dim() const {
    int s = 0;
    for (const auto& v : vertices) s += v.dim;
    return s;
}

bool System::nonnegative() const {
    for (const auto& e : edges)
        if ((e.m.array() < 0.0).any()) return false;
    return true;
}

void System::finalize() {
    vindex_.clear();
    eindex_.clear();
    if (vertices.empty()) throw SchemaError("system has no vertices");
    for (int i = 0; i < vertex_count(); ++i) {
        const auto& v = vertices[i];
        if (v.id.empty()) throw SchemaError("vertex with empty id");
        if (v.dim < 1) throw SchemaError("vertex '" + v.id + "' has dim " + std::to_string(v.dim) + ", need >= 1");
        if (!vindex_.emplace(v.id, i).second) throw SchemaError("duplicate vertex id '" + v.id + "'");
    }
    out.assign(vertices.size(), {});
    in.assign(vertices.size(), {});
    for (int k = 0; k < edge_count(); ++k) {
        const auto& e = edges[k];
        if (e.id.empty()) throw SchemaError("edge with empty id");
        if (!eindex_.emplace(e.id, k).second) throw SchemaError("duplicate edge id '" + e.id + "'");
        if (e.from < 0 || e.from >= vertex_count() || e.to < 0 || e.to >= vertex_count())
            throw SchemaError("edge '" + e.id + "' references a missing vertex");
        int dc = vertices[e.from].dim, dr = vertices[e.to].dim;
        if (e.m.rows() != dr || e.m.cols() != dc)
            throw SchemaError("edge '" + e.id + "' matrix is " + std::to_string(e.m.rows()) + "x" +
                              std::to_string(e.m.cols()) + ", expected " + std::to_string(dr) + "x" +
                              std::to_string(dc));
        if (!e.m.allFinite()) throw SchemaError("edge '" + e.id + "' has non-finite entries");
        out[e.from].push_back(k);
        in[e.to].push_back(k);
    }
}

System build_system(const std::vector<Vertex>& vertices, const std::vector<EdgeSpec>& edges) {
    System sys;
    sys.vertices = vertices;
    std::unordered_map<std::string, int> vid;
    for (int i = 0; i < static_cast<int>(vertices.size()); ++i) vid[vertices[i].id] = i;
    for (const auto& es : edges) {
        auto fi = vid.find(es.from);
        auto ti = vid.find(es.to);
        if (fi == vid.end()) throw SchemaError("edge '" + es.id + "' from unknown vertex '" + es.from + "'");
        if (ti == vid.end()) throw SchemaError("edge '" + es.id + "' to unknown vertex '" + es.to + "'");
        sys.edges.push_back(Edge{es.id, fi->second, ti->second, es.label, es.m});
    }
    sys.finalize();
    return sys;
}

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) { ok = true; break; }
        if (!ok) throw SchemaError("unknown key '" + it.key() + "' in " + where);
    }
}

}  // namespace

System load_system(const std::string& document) {
    json doc;
    try {
        doc = json::parse(document);
    } catch (const std::exception& ex) {
        throw SchemaError(std::string("system document is not valid JSON: ") + ex.what());
    }
    if (!doc.is_object()) throw SchemaError("system document must be an object");
    reject_unknown_keys(doc, {"vertices", "edges"}, "system document");
    if (!doc.contains("vertices") || !doc["vertices"].is_array())
        throw SchemaError("system document needs a 'vertices' array");
    if (!doc.contains("edges") || !doc["edges"].is_array())
        throw SchemaError("system document needs an 'edges' array");

    std::vector<Vertex> vertices;
    for (const auto& jv : doc["vertices"]) {
        if (!jv.is_object()) throw SchemaError("vertex entries must be objects");
        reject_unknown_keys(jv, {"id", "dim"}, "vertex entry");
        if (!jv.contains("id") || !jv["id"].is_string()) throw SchemaError("vertex entry needs string 'id'");
        if (!jv.contains("dim") || !jv["dim"].is_number_integer())
            throw SchemaError("vertex entry needs integer 'dim'");
        vertices.push_back(Vertex{jv["id"].get<std::string>(), jv["dim"].get<int>()});
    }

    std::vector<EdgeSpec> edges;
    for (const auto& je : doc["edges"]) {
        if (!je.is_object()) throw SchemaError("edge entries must be objects");
        reject_unknown_keys(je, {"id", "from", "to", "label", "matrix"}, "edge entry");
        for (const char* k : {"id", "from", "to", "label"})
            if (!je.contains(k) || !je[k].is_string())
                throw SchemaError(std::string("edge entry needs string '") + k + "'");
        if (!je.contains("matrix") || !je["matrix"].is_array())
            throw SchemaError("edge entry needs 'matrix' as an array of rows");
        const auto& jm = je["matrix"];
        if (jm.empty()) throw SchemaError("edge '" + je["id"].get<std::string>() + "' has an empty matrix");
        int rows = static_cast<int>(jm.size());
        int cols = -1;
        for (const auto& row : jm) {
            if (!row.is_array() || row.empty())
                throw SchemaError("edge '" + je["id"].get<std::string>() + "' matrix rows must be nonempty arrays");
            if (cols < 0) cols = static_cast<int>(row.size());
            if (static_cast<int>(row.size()) != cols)
                throw SchemaError("edge '" + je["id"].get<std::string>() + "' matrix rows have uneven lengths");
            for (const auto& x : row)
                if (!x.is_number())
                    throw SchemaError("edge '" + je["id"].get<std::string>() + "' matrix entries must be numbers");
        }
        Mat m(rows, cols);
        for (int r = 0; r < rows; ++r)
            for (int c = 0; c < cols; ++c) m(r, c) = jm[r][c].get<double>();
        edges.push_back(EdgeSpec{je["id"].get<std::string>(), je["from"].get<std::string>(),
                                 je["to"].get<std::string>(), je["label"].get<std::string>(), m});
    }
    return build_system(vertices, edges);
}

System load_system_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return load_system(ss.str());
}

std::string save_system(const System& sys) {
    return dump_json_canonical(system_to_json(sys)) + "\n";
}

void save_system_file(const System& sys, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path + "'");
    f << save_system(sys);
}

int path_start(const System& sys, const Path& p) {
    if (p.edges.empty()) {
        if (p.anchor < 0 || p.anchor >= sys.vertex_count())
            throw Error("empty path needs a valid anchor vertex");
        return p.anchor;
    }
    return sys.edges[p.edges.front()].from;
}

int path_end(const System& sys, const Path& p) {
    if (p.edges.empty()) return path_start(sys, p);
    return sys.edges[p.edges.back()].to;
}

bool path_closed(const System& sys, const Path& p) {
    return path_start(sys, p) == path_end(sys, p);
}

Mat product_along_path(const System& sys, const Path& p) {
    int start = path_start(sys, p);
    if (p.edges.empty()) {
        int d = sys.vertices[start].dim;
        return Mat::Identity(d, d);
    }
    int at = start;
    Mat prod;
    bool first = true;
    for (int ei : p.edges) {
        if (ei < 0 || ei >= sys.edge_count()) throw Error("path references a missing edge");
        const Edge& e = sys.edges[ei];
        if (e.from != at)
            throw Error("path edges '" + e.id + "' not incident with the previous edge");
        prod = first ? e.m : Mat(e.m * prod);
        first = false;
        at = e.to;
    }
    return prod;
}

std::vector<std::string> path_edge_ids(const System& sys, const Path& p) {
    std::vector<std::string> ids;
    ids.reserve(p.edges.size());
    for (int ei : p.edges) ids.push_back(sys.edges[ei].id);
    return ids;
}

std::vector<std::string> path_labels(const System& sys, const Path& p) {
    std::vector<std::string> labels;
    labels.reserve(p.edges.size());
    for (int ei : p.edges) labels.push_back(sys.edges[ei].label);
    return labels;
}

double operator_norm(const Mat& m) {
    if (!m.allFinite()) throw Error("operator_norm: non-finite entries");
    if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(0);
}

double spectral_radius(const Mat& m) {
    if (m.rows() != m.cols()) throw Error("spectral_radius: matrix not square");
    if (m.rows() == 1) return std::abs(m(0, 0));
    Eigen::EigenSolver<Mat> es(m, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

// Smallest growth factor of the map: min_{|y|=1} |My|. Zero when the map
// cannot be injective.
double min_growth(const Mat& m) {
    if (m.rows() < m.cols()) return 0.0;
    if (m.rows() == 1 && m.cols() == 1) return std::abs(m(0, 0));
    Eigen::JacobiSVD<Mat> svd(m);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

struct WalkScan {
    const System& sys;
    int k_max;
    std::uint64_t cap;
    std::uint64_t visited = 0;
    // per length 1..k_max
    std::vector<double> max_norm, min_norm, min_growth_v;
    std::vector<bool> any;
    double best_cycle_max = 0.0;
    double best_cycle_min = std::numeric_limits<double>::infinity();
    bool any_cycle = false;

    WalkScan(const System& s, int k, std::uint64_t c)
        : sys(s), k_max(k), cap(c),
          max_norm(k + 1, 0.0),
          min_norm(k + 1, std::numeric_limits<double>::infinity()),
          min_growth_v(k + 1, std::numeric_limits<double>::infinity()),
          any(k + 1, false) {}

    void dfs(int start, int at, const Mat& prod, int len) {
        for (int ei : sys.out[at]) {
            const Edge& e = sys.edges[ei];
            if (++visited > cap)
                throw CapError("path enumeration exceeded cap of " + std::to_string(cap));
            Mat next = e.m * prod;
            int nlen = len + 1;
            any[nlen] = true;
            double nn = operator_norm(next);
            max_norm[nlen] = std::max(max_norm[nlen], nn);
            min_norm[nlen] = std::min(min_norm[nlen], nn);
            min_growth_v[nlen] = std::min(min_growth_v[nlen], min_growth(next));
            if (e.to == start) {
                double val = std::pow(spectral_radius(next), 1.0 / nlen);
                best_cycle_max = std::max(best_cycle_max, val);
                best_cycle_min = std::min(best_cycle_min, val);
                any_cycle = true;
            }
            if (nlen < k_max) dfs(start, e.to, next, nlen);
        }
    }

    void run() {
        for (int v = 0; v < sys.vertex_count(); ++v) {
            Mat id = Mat::Identity(sys.vertices[v].dim, sys.vertices[v].dim);
            dfs(v, v, id, 0);
        }
    }
};

}  // namespace

BoundsBracket brute_force_bounds(const System& sys, int k_max, std::uint64_t path_cap) {
    if (k_max < 1) throw Error("brute_force_bounds: k_max must be >= 1");
    WalkScan scan(sys, k_max, path_cap);
    scan.run();
    BoundsBracket b;
    b.k_used = k_max;
    b.lower = scan.any_cycle ? scan.best_cycle_max : 0.0;
    double upper = std::numeric_limits<double>::infinity();
    bool any_len = false;
    for (int k = 1; k <= k_max; ++k) {
        if (!scan.any[k]) continue;
        any_len = true;
        upper = std::min(upper, std::pow(scan.max_norm[k], 1.0 / k));
    }
    // No walks at all means no products; the growth rate is zero.
    b.upper = any_len ? upper : 0.0;
    if (b.upper < b.lower) b.upper = b.lower;  // guard against eig/svd rounding
    return b;
}

BoundsBracket brute_force_min_bounds(const System& sys, int k_max, std::uint64_t path_cap) {
    if (k_max < 1) throw Error("brute_force_min_bounds: k_max must be >= 1");
    WalkScan scan(sys, k_max, path_cap);
    scan.run();
    BoundsBracket b;
    b.k_used = k_max;
    double upper = scan.any_cycle ? scan.best_cycle_min : 0.0;
    double lower = 0.0;
    for (int k = 1; k <= k_max; ++k) {
        if (!scan.any[k]) continue;
        upper = std::min(upper, std::pow(scan.min_norm[k], 1.0 / k));
        lower = std::max(lower, std::pow(scan.min_growth_v[k], 1.0 / k));
    }
    b.lower = std::min(lower, upper);
    b.upper = upper;
    return b;
}

}  // namespace cjsr
