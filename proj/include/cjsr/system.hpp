#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "cjsr/error.hpp"

namespace cjsr {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct Vertex {
    std::string id;
    int dim = 0;
};

// Edge operator maps the space at `from` into the space at `to`,
// so the matrix has dim(to) rows and dim(from) columns.
struct Edge {
    std::string id;
    int from = 0;
    int to = 0;
    std::string label;
    Mat m;
};

class System {
public:
    std::vector<Vertex> vertices;
    std::vector<Edge> edges;

    // Derived adjacency, rebuilt by finalize(). Edge indices keep input order.
    std::vector<std::vector<int>> out;
    std::vector<std::vector<int>> in;

    int vertex_index(const std::string& id) const;
    int edge_index(const std::string& id) const;
    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int edge_count() const { return static_cast<int>(edges.size()); }
    int total_dim() const;
    bool nonnegative() const;

    // Validates and rebuilds adjacency. Throws SchemaError on any defect.
    void finalize();

private:
    std::unordered_map<std::string, int> vindex_;
    std::unordered_map<std::string, int> eindex_;
};

struct EdgeSpec {
    std::string id;
    std::string from;
    std::string to;
    std::string label;
    Mat m;
};

System build_system(const std::vector<Vertex>& vertices, const std::vector<EdgeSpec>& edges);

System load_system(const std::string& document);
System load_system_file(const std::string& path);
std::string save_system(const System& sys);
void save_system_file(const System& sys, const std::string& path);

// A walk given by consecutive edges; empty walks need an explicit anchor vertex.
struct Path {
    std::vector<int> edges;
    int anchor = -1;
};

int path_start(const System& sys, const Path& p);
int path_end(const System& sys, const Path& p);
bool path_closed(const System& sys, const Path& p);

// Operators compose right to left: the first edge of the walk is applied first.
Mat product_along_path(const System& sys, const Path& p);

std::vector<std::string> path_edge_ids(const System& sys, const Path& p);
std::vector<std::string> path_labels(const System& sys, const Path& p);

struct BoundsBracket {
    double lower = 0.0;
    double upper = 0.0;
    int k_used = 0;
};

// Exhaustive bracket over all walks of length <= k_max:
// lower from spectral radii of closed walks, upper from the best
// uniform-length operator-norm bound. Work is capped, never truncated.
BoundsBracket brute_force_bounds(const System& sys, int k_max,
                                 std::uint64_t path_cap = 10000000ull);

// Same enumeration, minimizing: min over closed walks of rho^(1/k) as the
// upper side and min over k of the smallest path norm^(1/k) as the lower side.
BoundsBracket brute_force_min_bounds(const System& sys, int k_max,
                                     std::uint64_t path_cap = 10000000ull);

double operator_norm(const Mat& m);
double spectral_radius(const Mat& m);

}  // namespace cjsr
