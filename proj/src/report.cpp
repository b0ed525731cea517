#include "cjsr/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cjsr/util.hpp"

namespace cjsr {

using nlohmann::json;

namespace {

void dump_rec(const json& j, std::string& out) {
    switch (j.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                dump_rec(it.value(), out);
            }
            out += '}';
            break;
        }
        case json::value_t::array: {
            out += '[';
            bool first = true;
            for (const auto& el : j) {
                if (!first) out += ',';
                first = false;
                dump_rec(el, out);
            }
            out += ']';
            break;
        }
        case json::value_t::number_float: {
            double v = j.get<double>();
            if (!std::isfinite(v)) throw Error("canonical JSON cannot hold non-finite numbers");
            out += fmt_g17(v);
            break;
        }
        default:
            out += j.dump();
    }
}

}  // namespace

std::string dump_json_canonical(const json& j) {
    std::string out;
    dump_rec(j, out);
    return out;
}

json matrix_to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json system_to_json(const System& sys) {
    json doc;
    json jv = json::array();
    for (const auto& v : sys.vertices) jv.push_back(json{{"id", v.id}, {"dim", v.dim}});
    json je = json::array();
    for (const auto& e : sys.edges) {
        je.push_back(json{{"id", e.id},
                          {"from", sys.vertices[e.from].id},
                          {"to", sys.vertices[e.to].id},
                          {"label", e.label},
                          {"matrix", matrix_to_json(e.m)}});
    }
    doc["vertices"] = std::move(jv);
    doc["edges"] = std::move(je);
    return doc;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write '" + path + "'");
    f << content;
}

}  // namespace cjsr
