#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include <json.hpp>

#include "cxgrid/numerics.hpp"

namespace cxgrid::io {

/// 17 significant digits, lowercase scientific ("%.16e").
std::string format_double(double v);

/// Complex numbers travel as [re, im] pairs; a bare number is accepted as real.
nlohmann::json to_json(Complex z);
Complex complex_from_json(const nlohmann::json& j);

nlohmann::json to_json(const CVector& v);
CVector vector_from_json(const nlohmann::json& j);

/// Row-major nested arrays.
nlohmann::json to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j);

/// Writes to a sibling temporary file and renames it over the target.
void write_file_atomically(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace cxgrid::io
