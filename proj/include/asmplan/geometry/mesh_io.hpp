#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "asmplan/geometry/mesh.hpp"

namespace asmplan {

enum class MeshFormat { obj, stl_binary };

/// Vertices closer than this are merged when reading STL.
inline constexpr double kStlWeldTolerance = 1e-4;

/// Loads a solid. OBJ: ASCII `v`/`f` records, triangles only; other record
/// types are skipped. STL: binary, little-endian, vertices welded.
/// Throws ParseError or NonManifold.
Mesh load_mesh(const std::filesystem::path& path, MeshFormat format);

/// Picks the format from the file extension (.obj / .stl).
Mesh load_mesh(const std::filesystem::path& path);

Mesh parse_obj(std::istream& in);
Mesh parse_stl_binary(std::istream& in);

void write_obj(std::ostream& out, const Mesh& mesh, const std::string& object_name = {});
void write_obj(const std::filesystem::path& path, const Mesh& mesh);
/// Several named solids in one OBJ file, one `o` record each.
void write_obj_scene(std::ostream& out, const std::vector<std::pair<std::string, Mesh>>& solids);
void write_stl_binary(std::ostream& out, const Mesh& mesh);
void write_stl_binary(const std::filesystem::path& path, const Mesh& mesh);

}  // namespace asmplan
