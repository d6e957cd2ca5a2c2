#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "core/decomposition.hpp"

namespace sdd {

/// Expansion document, version 1. Coordinates carry the measure, degree,
/// flat knot vector, and the row-major lower-triangular whitening factor
/// (the Cholesky factor Q of the spline moment matrix; basis values solve
/// Q psi = P). Terms use one-based coordinates and basis indices starting
/// at 2 for the first non-constant element. Key order is alphabetical, so
/// serialization is byte-stable.
nlohmann::json expansion_to_json(const SddExpansion& expansion);
SddExpansion expansion_from_json(const nlohmann::json& doc);

std::string expansion_to_string(const SddExpansion& expansion);
SddExpansion expansion_from_string(const std::string& text);

void save_expansion(const SddExpansion& expansion, const std::filesystem::path& path);
SddExpansion load_expansion(const std::filesystem::path& path);

nlohmann::json measure_to_json(const MeasureSpec& measure);
MeasureSpec measure_from_json(const nlohmann::json& doc);

}  // namespace sdd
