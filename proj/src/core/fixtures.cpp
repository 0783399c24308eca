#include "asmplan/fixtures.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <queue>
#include <set>

#include "asmplan/errors.hpp"

namespace asmplan {
namespace {

using Scene = std::vector<std::pair<std::string, std::vector<Cell>>>;

std::vector<Cell> box_cells(Cell lo, Cell hi) {
    std::vector<Cell> out;
    for (int x = lo[0]; x < hi[0]; ++x)
        for (int y = lo[1]; y < hi[1]; ++y)
            for (int z = lo[2]; z < hi[2]; ++z) out.push_back({x, y, z});
    return out;
}

std::vector<Cell> minus(std::vector<Cell> a, const std::vector<Cell>& b) {
    std::erase_if(a, [&](const Cell& c) { return std::find(b.begin(), b.end(), c) != b.end(); });
    return a;
}

const Scene kSoma3 = {
    {"T", {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {1, 1, 0}}},
    {"Tri", {{2, 1, 0}, {2, 2, 0}, {1, 2, 0}}},
    {"Z", {{0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {2, 1, 1}}},
};
const std::pair<std::string, std::vector<Cell>> kSomaL = {"L", {{0, 1, 0}, {0, 2, 0}, {0, 2, 1}, {1, 2, 1}}};
const std::pair<std::string, std::vector<Cell>> kSomaSl = {"Sl", {{1, 1, 2}, {2, 1, 2}, {2, 2, 2}}};

AssemblyProblem stack3() {
    AssemblyProblem p;
    const Mesh cube = make_box(Vec3(-15, -15, 0), Vec3(15, 15, 30));
    const char* ids[] = {"base", "middle", "top"};
    for (int i = 0; i < 3; ++i) p.parts.push_back({ids[i], {}, cube, Pose::from_translation({0, 0, 30.0 * i})});
    return p;
}

AssemblyProblem sym2() {
    AssemblyProblem p;
    const Mesh cube = make_box(Vec3::Zero(), Vec3(30, 30, 30));
    p.parts.push_back({"A", {}, cube, Pose::from_translation({-30, -15, 0})});
    Mat3 half_turn = Mat3::Zero();
    half_turn(0, 0) = -1;
    half_turn(1, 1) = -1;
    half_turn(2, 2) = 1;
    p.parts.push_back({"B", {}, cube, Pose(half_turn, Vec3(30, 15, 0))});
    return p;
}

}  // namespace

Mesh voxel_mesh(const VoxelSpec& spec) {
    if (spec.cells.empty()) throw DisconnectedVoxels("no cells");
    const std::set<Cell> cells(spec.cells.begin(), spec.cells.end());

    // Face connectivity.
    std::set<Cell> reached{*cells.begin()};
    std::queue<Cell> todo;
    todo.push(*cells.begin());
    while (!todo.empty()) {
        const Cell c = todo.front();
        todo.pop();
        for (int a = 0; a < 3; ++a) {
            for (int s : {-1, 1}) {
                Cell nb = c;
                nb[a] += s;
                if (cells.contains(nb) && reached.insert(nb).second) todo.push(nb);
            }
        }
    }
    if (reached.size() != cells.size()) {
        throw DisconnectedVoxels(std::to_string(cells.size() - reached.size()) + " of " +
                                 std::to_string(cells.size()) + " cells are not face-connected");
    }

    struct Quad {
        Cell cell;                  // the occupied cell the face bounds
        std::array<Cell, 4> corner; // grid points, outward winding
    };
    std::vector<Quad> quads;
    for (const auto& c : cells) {
        for (int a = 0; a < 3; ++a) {
            const int u = (a + 1) % 3, v = (a + 2) % 3;
            for (int s : {-1, 1}) {
                Cell nb = c;
                nb[a] += s;
                if (cells.contains(nb)) continue;
                Cell base = c;
                if (s > 0) base[a] += 1;
                Cell p1 = base, p2 = base, p3 = base;
                p1[u] += 1;
                p2[u] += 1;
                p2[v] += 1;
                p3[v] += 1;
                quads.push_back({c, s > 0 ? std::array<Cell, 4>{base, p1, p2, p3} : std::array<Cell, 4>{base, p3, p2, p1}});
            }
        }
    }

    // One vertex per surface sheet at each grid point: corners of faces that
    // meet across an edge are merged; where four faces share an edge (cells
    // touching along it only), faces pair up with the cell they bound.
    std::vector<std::size_t> parent(quads.size() * 4);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto join = [&](std::size_t x, std::size_t y) { parent[find(x)] = find(y); };

    std::map<std::pair<Cell, Cell>, std::vector<std::pair<std::size_t, int>>> edges;
    for (std::size_t q = 0; q < quads.size(); ++q) {
        for (int k = 0; k < 4; ++k) {
            const Cell& a = quads[q].corner[k];
            const Cell& b = quads[q].corner[(k + 1) % 4];
            edges[std::minmax(a, b)].push_back({q, k});
        }
    }
    auto corner_slot = [&](std::size_t q, const Cell& g) {
        for (int k = 0; k < 4; ++k) {
            if (quads[q].corner[k] == g) return q * 4 + static_cast<std::size_t>(k);
        }
        throw NonManifold("voxel face lost a corner");
    };
    for (const auto& [key, uses] : edges) {
        std::vector<std::pair<std::size_t, std::size_t>> pairs;
        if (uses.size() == 2) {
            pairs.push_back({uses[0].first, uses[1].first});
        } else {
            for (std::size_t i = 0; i < uses.size(); ++i) {
                for (std::size_t j = i + 1; j < uses.size(); ++j) {
                    if (quads[uses[i].first].cell == quads[uses[j].first].cell) pairs.push_back({uses[i].first, uses[j].first});
                }
            }
        }
        for (const auto& [qa, qb] : pairs) {
            join(corner_slot(qa, key.first), corner_slot(qb, key.first));
            join(corner_slot(qa, key.second), corner_slot(qb, key.second));
        }
    }

    std::map<std::size_t, std::uint32_t> index;
    std::vector<Vec3> verts;
    std::vector<Triangle> tris;
    auto vertex = [&](std::size_t q, int k) {
        auto [it, inserted] = index.try_emplace(find(q * 4 + static_cast<std::size_t>(k)), static_cast<std::uint32_t>(verts.size()));
        if (inserted) {
            const Cell& g = quads[q].corner[k];
            verts.emplace_back(g[0] * spec.cell_size, g[1] * spec.cell_size, g[2] * spec.cell_size);
        }
        return it->second;
    };
    for (std::size_t q = 0; q < quads.size(); ++q) {
        const auto i0 = vertex(q, 0), i1 = vertex(q, 1), i2 = vertex(q, 2), i3 = vertex(q, 3);
        tris.push_back({i0, i1, i2});
        tris.push_back({i0, i2, i3});
    }
    return Mesh::build(std::move(verts), std::move(tris));
}

AssemblyProblem voxel_problem(const std::vector<std::pair<std::string, std::vector<Cell>>>& parts, double cell_size) {
    AssemblyProblem p;
    for (const auto& [id, cells] : parts) {
        Cell lo = cells.front();
        for (const auto& c : cells)
            for (int a = 0; a < 3; ++a) lo[a] = std::min(lo[a], c[a]);
        VoxelSpec spec{{}, cell_size};
        for (const auto& c : cells) spec.cells.push_back({c[0] - lo[0], c[1] - lo[1], c[2] - lo[2]});
        p.parts.push_back({id, {}, voxel_mesh(spec),
                           Pose::from_translation(Vec3(lo[0], lo[1], lo[2]) * cell_size)});
    }
    return p;
}

AssemblyProblem handle_hole_scene(bool with_handle) {
    // Plate 7x3 cells, two layers, with a one-cell blind hole at (3,1,1); the
    // block stands one cell proud of the plate; the arch spans the hole two
    // cells above the block top.
    Scene s;
    s.push_back({"plate", minus(box_cells({0, 0, 0}, {7, 3, 2}), {{3, 1, 1}})});
    s.push_back({"block", {{3, 1, 1}, {3, 1, 2}}});
    if (with_handle) {
        std::vector<Cell> arch = {{0, 1, 2}, {0, 1, 3}, {6, 1, 2}, {6, 1, 3}};
        for (int x = 0; x < 7; ++x) arch.push_back({x, 1, 4});
        s.push_back({"handle", arch});
    }
    return voxel_problem(s, 20.0);
}

const std::vector<std::string>& scene_names() {
    static const std::vector<std::string> names = {"stack3", "soma3", "soma4", "soma5", "pocket",
                                                   "enclosure", "handle_hole", "sym2", "nosolution3"};
    return names;
}

AssemblyProblem make_scene(const std::string& name) {
    if (name == "stack3") return stack3();
    if (name == "sym2") return sym2();
    if (name == "soma3") return voxel_problem(kSoma3, 20.0);
    if (name == "soma4") {
        Scene s = kSoma3;
        s.push_back(kSomaL);
        return voxel_problem(s, 20.0);
    }
    if (name == "soma5") {
        Scene s = kSoma3;
        s.push_back(kSomaL);
        s.push_back(kSomaSl);
        return voxel_problem(s, 20.0);
    }
    if (name == "pocket") {
        // 3x3 floor with a one-cell ring wall; the peg stands one cell proud.
        return voxel_problem({{"base", minus(box_cells({0, 0, 0}, {3, 3, 2}), {{1, 1, 1}})},
                              {"peg", {{1, 1, 1}, {1, 1, 2}}}},
                             20.0);
    }
    if (name == "enclosure") {
        return voxel_problem({{"shell", minus(box_cells({0, 0, 0}, {3, 3, 3}), {{1, 1, 1}})},
                              {"core", {{1, 1, 1}}}},
                             20.0);
    }
    if (name == "handle_hole") return handle_hole_scene(true);
    if (name == "nosolution3") {
        // A cup whose peg sits flush with the rim, closed by a lid.
        return voxel_problem({{"cup", minus(box_cells({0, 0, 0}, {3, 3, 2}), {{1, 1, 1}})},
                              {"peg", {{1, 1, 1}}},
                              {"lid", box_cells({0, 0, 2}, {3, 3, 3})}},
                             20.0);
    }
    throw UnknownScene("unknown scene '" + name + "'");
}

}  // namespace asmplan
