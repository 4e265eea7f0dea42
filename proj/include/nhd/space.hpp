#pragma once

#include "element.hpp"
#include "mesh.hpp"

#include <functional>
#include <span>
#include <vector>

namespace nhd
{
	/// Degree-p edge-element space on the whole mesh (tangential trace zero on the
	/// outer boundary) paired with the degree-p Raviart-Thomas space on the metal
	/// triangles (normal trace zero on the metal boundary).
	///
	/// Global numbering: E-dofs first, then J-dofs. Within each block, edge moments
	/// in edge order come before interior moments in triangle order.
	class SpacePair
	{
	public:
		SpacePair(const Mesh2D &mesh, int degree);

		int degree() const { return degree_; }
		const RaviartThomasElement &element() const { return *element_; }
		int local_dim() const { return element_->dim(); }

		int num_e() const { return num_e_; }
		int num_j() const { return num_j_; }
		int size() const { return num_e_ + num_j_; }

		/// Global index per local basis function, -1 where eliminated.
		std::span<const int> e_dofs(int t) const;
		/// Empty for non-metal triangles.
		std::span<const int> j_dofs(int t) const;
		/// +-1 per local basis function: global basis = sign * local basis.
		std::span<const double> signs(int t) const;

	private:
		int degree_;
		const RaviartThomasElement *element_;
		int num_e_ = 0, num_j_ = 0;
		std::vector<int> e_map_, j_map_;
		std::vector<int> j_offset_;
		std::vector<double> signs_;
	};

	/// Canonical interpolant of smooth fields into the discrete pair. `e` is
	/// interpolated into the edge-element space and `j` into the metal
	/// Raviart-Thomas space; eliminated boundary moments are dropped.
	/// Per triangle, the global unknowns that no other triangle touches (interior
	/// moments of both fields); empty for p = 0 on vacuum triangles.
	std::vector<std::vector<int>> element_interior_dofs(const Mesh2D &mesh, const SpacePair &space);

	CVector interpolate(const Mesh2D &mesh, const SpacePair &space, const std::function<CVec2(const Vec2 &)> &e,
	                    const std::function<CVec2(const Vec2 &)> &j, int order = 12);
} // namespace nhd
