#pragma once

#include <string>

#include "json.hpp"

#include "cjsr/system.hpp"

namespace cjsr {

// Canonical JSON text: keys sorted, floats printed with %.17g so equal
// values always serialize to equal bytes. Non-finite numbers are rejected.
std::string dump_json_canonical(const nlohmann::json& j);

nlohmann::json system_to_json(const System& sys);
nlohmann::json matrix_to_json(const Mat& m);
nlohmann::json vector_to_json(const Vec& v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace cjsr
