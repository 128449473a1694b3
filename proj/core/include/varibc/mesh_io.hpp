#pragma once

#include "varibc/mesh.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace varibc {

// Plain-text mesh format:
//   nodes <n> triangles <m>
//   x y            (n lines)
//   i j k tag      (m lines, 0-based, tag 0/1/2 = designable/solid/void)
// Whitespace separated; '#' starts a comment.

MeshModel read_mesh(std::istream& in, double thickness);
MeshModel read_mesh_file(const std::string& path, double thickness);
void write_mesh(std::ostream& out, const MeshModel& mesh);
void write_mesh_file(const std::string& path, const MeshModel& mesh);

using CellField = std::pair<std::string, std::vector<double>>;

/// Legacy ASCII VTK 4.x unstructured grid with per-cell scalar fields.
/// Element tags are always written as the integer field "tag".
void write_vtk(std::ostream& out, const MeshModel& mesh, const std::vector<CellField>& cell_fields,
               const std::string& title = "varibc");
void write_vtk_file(const std::string& path, const MeshModel& mesh,
                    const std::vector<CellField>& cell_fields);

/// Reads back a file produced by write_vtk (geometry and tags).
MeshModel read_vtk(std::istream& in, double thickness);
MeshModel read_vtk_file(const std::string& path, double thickness);

/// Dispatches on the ".vtk" extension.
MeshModel import_mesh(const std::string& path, double thickness);

}  // namespace varibc
