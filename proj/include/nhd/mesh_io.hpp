#pragma once

#include "mesh.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace nhd
{
	using NamedField = std::pair<std::string, std::vector<double>>;

	/// Legacy VTK ASCII unstructured grid: points, triangles, per-cell `region`
	/// tag, followed by optional point and cell scalars.
	void write_vtk(std::ostream &os, const Mesh2D &mesh, const std::vector<NamedField> &point_data = {},
	               const std::vector<NamedField> &cell_data = {});
	void write_vtk(const std::string &path, const Mesh2D &mesh, const std::vector<NamedField> &point_data = {},
	               const std::vector<NamedField> &cell_data = {});

	/// Reads what write_vtk produces. Vertex order inside triangles is kept.
	Mesh2D read_vtk(std::istream &is);
	Mesh2D read_vtk(const std::string &path);
} // namespace nhd
