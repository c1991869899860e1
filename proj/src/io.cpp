#include "plate/io.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>
#include <system_error>

namespace plate::io {

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot open {} for writing", tmp.string()));
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error(fmt::format("write to {} failed", tmp.string()));
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw Error(fmt::format("cannot rename {} to {}: {}", tmp.string(), path.string(), ec.message()));
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFoundError(fmt::format("cannot open {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string vtu_string(const Triangulation& mesh, const PointData& point_data) {
  const auto nv = mesh.num_vertices();
  const auto nt = mesh.num_triangles();
  for (const auto& [name, values] : point_data) {
    if (values.size() != static_cast<Eigen::Index>(nv)) {
      throw ArgumentError(fmt::format("field '{}' has {} values for {} vertices", name,
                                      values.size(), nv));
    }
  }
  std::string out;
  out += "<?xml version=\"1.0\"?>\n";
  out += "<VTKFile type=\"UnstructuredGrid\" version=\"0.1\" byte_order=\"LittleEndian\">\n";
  out += "<UnstructuredGrid>\n";
  out += fmt::format("<Piece NumberOfPoints=\"{}\" NumberOfCells=\"{}\">\n", nv, nt);
  out += "<PointData>\n";
  for (const auto& [name, values] : point_data) {
    out += fmt::format("<DataArray type=\"Float64\" Name=\"{}\" format=\"ascii\">\n", name);
    for (Eigen::Index i = 0; i < values.size(); ++i) out += fmt::format("{:.17g}\n", values[i]);
    out += "</DataArray>\n";
  }
  out += "</PointData>\n<Points>\n";
  out += "<DataArray type=\"Float64\" NumberOfComponents=\"3\" format=\"ascii\">\n";
  for (const auto& p : mesh.vertices()) out += fmt::format("{:.17g} {:.17g} 0\n", p.x(), p.y());
  out += "</DataArray>\n</Points>\n<Cells>\n";
  out += "<DataArray type=\"Int64\" Name=\"connectivity\" format=\"ascii\">\n";
  for (const auto& t : mesh.triangles()) out += fmt::format("{} {} {}\n", t[0], t[1], t[2]);
  out += "</DataArray>\n<DataArray type=\"Int64\" Name=\"offsets\" format=\"ascii\">\n";
  for (std::size_t t = 0; t < nt; ++t) out += fmt::format("{}\n", 3 * (t + 1));
  out += "</DataArray>\n<DataArray type=\"UInt8\" Name=\"types\" format=\"ascii\">\n";
  for (std::size_t t = 0; t < nt; ++t) out += "5\n";
  out += "</DataArray>\n</Cells>\n</Piece>\n</UnstructuredGrid>\n</VTKFile>\n";
  return out;
}

}  // namespace plate::io
