#include "asmplan/geometry/mesh_io.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "asmplan/errors.hpp"

namespace asmplan {
namespace {

static_assert(std::endian::native == std::endian::little, "STL reader assumes a little-endian host");

long parse_obj_index(std::string_view token, std::size_t vertex_count, int line_no) {
    const auto slash = token.find('/');
    const std::string head(token.substr(0, slash));
    std::size_t used = 0;
    long idx = 0;
    try {
        idx = std::stol(head, &used);
    } catch (const std::exception&) {
        throw ParseError("OBJ line " + std::to_string(line_no) + ": bad face index '" + std::string(token) + "'");
    }
    if (used != head.size() || idx == 0) {
        throw ParseError("OBJ line " + std::to_string(line_no) + ": bad face index '" + std::string(token) + "'");
    }
    const long resolved = idx > 0 ? idx - 1 : static_cast<long>(vertex_count) + idx;
    if (resolved < 0 || resolved >= static_cast<long>(vertex_count)) {
        throw ParseError("OBJ line " + std::to_string(line_no) + ": face index " + std::to_string(idx) +
                         " out of range");
    }
    return resolved;
}

/// Spatial-hash vertex welding.
class Welder {
public:
    explicit Welder(double tol) : tol_(tol) {}

    std::uint32_t insert(const Vec3& p) {
        const auto cell = cell_of(p);
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dz = -1; dz <= 1; ++dz) {
                    auto it = grid_.find(key(cell[0] + dx, cell[1] + dy, cell[2] + dz));
                    if (it == grid_.end()) continue;
                    for (auto idx : it->second) {
                        if ((points_[idx] - p).norm() <= tol_) return idx;
                    }
                }
        const auto idx = static_cast<std::uint32_t>(points_.size());
        points_.push_back(p);
        grid_[key(cell[0], cell[1], cell[2])].push_back(idx);
        return idx;
    }

    std::vector<Vec3> take() { return std::move(points_); }

private:
    std::array<std::int64_t, 3> cell_of(const Vec3& p) const {
        return {static_cast<std::int64_t>(std::floor(p.x() / tol_)),
                static_cast<std::int64_t>(std::floor(p.y() / tol_)),
                static_cast<std::int64_t>(std::floor(p.z() / tol_))};
    }
    static std::uint64_t key(std::int64_t x, std::int64_t y, std::int64_t z) {
        auto h = static_cast<std::uint64_t>(x) * 0x9E3779B97F4A7C15ull;
        h ^= static_cast<std::uint64_t>(y) * 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2);
        h ^= static_cast<std::uint64_t>(z) * 0x165667B19E3779F9ull + (h << 6) + (h >> 2);
        return h;
    }

    double tol_;
    std::vector<Vec3> points_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> grid_;
};

template <typename T>
T read_le(const char* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return v;
}

template <typename T>
void write_le(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

}  // namespace

Mesh parse_obj(std::istream& in) {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            double x, y, z;
            if (!(ls >> x >> y >> z)) {
                throw ParseError("OBJ line " + std::to_string(line_no) + ": expected three vertex coordinates");
            }
            vertices.emplace_back(x, y, z);
        } else if (tag == "f") {
            std::vector<std::string> tokens;
            std::string tok;
            while (ls >> tok) tokens.push_back(tok);
            if (tokens.size() != 3) {
                throw ParseError("OBJ line " + std::to_string(line_no) + ": only triangular faces are supported");
            }
            Triangle t{};
            for (int k = 0; k < 3; ++k) {
                t[k] = static_cast<std::uint32_t>(parse_obj_index(tokens[k], vertices.size(), line_no));
            }
            triangles.push_back(t);
        }
        // vn, vt, o, g, s, usemtl, mtllib: irrelevant for solids
    }
    if (in.bad()) throw ParseError("OBJ read failed");
    if (triangles.empty()) throw ParseError("OBJ contains no faces");
    return Mesh::build(std::move(vertices), std::move(triangles));
}

Mesh parse_stl_binary(std::istream& in) {
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (data.size() < 84) throw ParseError("STL shorter than its 84-byte header");
    const auto count = read_le<std::uint32_t>(data.data() + 80);
    const std::size_t expected = 84 + static_cast<std::size_t>(count) * 50;
    if (data.size() != expected) {
        throw ParseError("STL size " + std::to_string(data.size()) + " does not match " +
                         std::to_string(count) + " triangles (" + std::to_string(expected) + " bytes)");
    }
    Welder welder(kStlWeldTolerance);
    std::vector<Triangle> triangles;
    triangles.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const char* rec = data.data() + 84 + static_cast<std::size_t>(i) * 50;
        Triangle t{};
        for (int k = 0; k < 3; ++k) {
            const char* v = rec + 12 + 12 * k;
            const Vec3 p(read_le<float>(v), read_le<float>(v + 4), read_le<float>(v + 8));
            if (!p.allFinite()) throw ParseError("STL triangle " + std::to_string(i) + " has a non-finite vertex");
            t[k] = welder.insert(p);
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
            throw NonManifold("STL triangle " + std::to_string(i) + " collapses after welding");
        }
        triangles.push_back(t);
    }
    return Mesh::build(welder.take(), std::move(triangles));
}

Mesh load_mesh(const std::filesystem::path& path, MeshFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open mesh file " + path.string());
    try {
        return format == MeshFormat::obj ? parse_obj(in) : parse_stl_binary(in);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what());
    } catch (const NonManifold& e) {
        throw NonManifold(path.string() + ": " + e.what());
    }
}

Mesh load_mesh(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".obj") return load_mesh(path, MeshFormat::obj);
    if (ext == ".stl") return load_mesh(path, MeshFormat::stl_binary);
    throw ParseError("unknown mesh extension '" + ext + "' for " + path.string());
}

void write_obj(std::ostream& out, const Mesh& mesh, const std::string& object_name) {
    const auto old_precision = out.precision(17);
    if (!object_name.empty()) out << "o " << object_name << '\n';
    for (const auto& v : mesh.vertices()) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
    for (const auto& t : mesh.triangles()) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    out.precision(old_precision);
}

void write_obj(const std::filesystem::path& path, const Mesh& mesh) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write " + path.string());
    write_obj(out, mesh);
}

void write_obj_scene(std::ostream& out, const std::vector<std::pair<std::string, Mesh>>& solids) {
    const auto old_precision = out.precision(17);
    std::size_t base = 1;
    for (const auto& [name, mesh] : solids) {
        out << "o " << name << '\n';
        for (const auto& v : mesh.vertices()) out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
        for (const auto& t : mesh.triangles()) {
            out << "f " << t[0] + base << ' ' << t[1] + base << ' ' << t[2] + base << '\n';
        }
        base += mesh.vertex_count();
    }
    out.precision(old_precision);
}

void write_stl_binary(std::ostream& out, const Mesh& mesh) {
    std::array<char, 80> header{};
    std::strncpy(header.data(), "asmplan binary STL", header.size());
    out.write(header.data(), header.size());
    write_le(out, static_cast<std::uint32_t>(mesh.triangle_count()));
    for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
        const Vec3 n = mesh.face_normal(t);
        for (int k = 0; k < 3; ++k) write_le(out, static_cast<float>(n[k]));
        for (int c = 0; c < 3; ++c) {
            const Vec3& v = mesh.corner(t, c);
            for (int k = 0; k < 3; ++k) write_le(out, static_cast<float>(v[k]));
        }
        write_le(out, std::uint16_t{0});
    }
}

void write_stl_binary(const std::filesystem::path& path, const Mesh& mesh) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path.string());
    write_stl_binary(out, mesh);
}

}  // namespace asmplan
