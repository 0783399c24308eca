#pragma once

#include <array>
#include <string>
#include <vector>

#include "asmplan/geometry/mesh.hpp"
#include "asmplan/problem.hpp"

namespace asmplan {

using Cell = std::array<int, 3>;

struct VoxelSpec {
    std::vector<Cell> cells;
    double cell_size = 20.0;
};

/// Closed mesh of the union of cells, internal faces removed, in the voxel
/// frame (cell (i,j,k) spans [i,i+1]x[j,j+1]x[k,k+1] times cell_size).
/// Throws DisconnectedVoxels if the cells are not face-connected.
Mesh voxel_mesh(const VoxelSpec& spec);

/// Scene names accepted by make_scene.
const std::vector<std::string>& scene_names();

/// stack3, soma3, soma4, soma5, pocket, enclosure, handle_hole, sym2,
/// nosolution3. Throws UnknownScene.
AssemblyProblem make_scene(const std::string& name);

/// The narrow-passage scene with or without the handle arch.
AssemblyProblem handle_hole_scene(bool with_handle);

/// Builds a problem from voxel parts: each part's mesh is expressed with its
/// minimum cell corner at the origin and posed by a pure translation.
AssemblyProblem voxel_problem(const std::vector<std::pair<std::string, std::vector<Cell>>>& parts, double cell_size);

}  // namespace asmplan
