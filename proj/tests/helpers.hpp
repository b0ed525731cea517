#pragma once

#include <string>
#include <vector>

#include "cjsr/system.hpp"

namespace cjsr_test {

inline std::string fixture(const char* name) {
    return std::string(CJSR_FIXTURE_DIR) + "/" + name;
}

// Single vertex, one self loop per matrix, labels A1..Am.
inline cjsr::System loops(const std::vector<cjsr::Mat>& mats) {
    std::vector<cjsr::Vertex> v{{"1", static_cast<int>(mats[0].rows())}};
    std::vector<cjsr::EdgeSpec> e;
    for (std::size_t i = 0; i < mats.size(); ++i)
        e.push_back({"e" + std::to_string(i + 1), "1", "1", "A" + std::to_string(i + 1), mats[i]});
    return cjsr::build_system(v, e);
}

inline cjsr::Mat mat2(double a, double b, double c, double d) {
    cjsr::Mat m(2, 2);
    m << a, b, c, d;
    return m;
}

}  // namespace cjsr_test
