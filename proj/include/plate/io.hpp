#pragma once

#include "plate/mesh.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace plate::io {

using PointData = std::vector<std::pair<std::string, Eigen::VectorXd>>;

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

/// ASCII VTK XML unstructured grid with float64 point fields, one value per vertex.
std::string vtu_string(const Triangulation& mesh, const PointData& point_data = {});

}  // namespace plate::io
