#pragma once

#include <string>

#include <json.hpp>

#include "spde1d/mc.hpp"

namespace spde1d {

/// Writes content to path via a temp file and atomic rename, so failures
/// never leave partial output behind.
void atomic_write(const std::string& path, const std::string& content);

/// %.17g formatting used for all CSV floating-point output.
std::string fmt_double(double v);

void ensure_directory(const std::string& dir);

nlohmann::json mc_report_json(const MCReport& r, std::uint64_t config_hash);

/// Long-format path CSV: time,node,value with a mandatory header.
std::string path_csv(const PathRecord& rec);
/// Grid CSV: x,value.
std::string grid_csv(const GridFunction& v);

void write_json(const std::string& path, const nlohmann::json& j);

}  // namespace spde1d
