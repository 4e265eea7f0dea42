#pragma once

#include "mesh.hpp"

#include <vector>

namespace nhd
{
	using Polygon = std::vector<Vec2>;

	double signed_area(const Polygon &poly);
	bool point_in_polygon(const Vec2 &p, const Polygon &poly);

	/// Square computational box (-L - layer, L + layer)^2 with an absorbing frame
	/// of width `layer` around the physical box (-L, L)^2 that holds the metal.
	struct DomainGeometry
	{
		std::vector<Polygon> metal;
		double half_width = 6.0; ///< L
		double layer = 4.0;      ///< PML thickness

		double outer() const { return half_width + layer; }
	};

	/// Throws GeometryError for zero-area, self-intersecting or out-of-box polygons.
	void validate(const DomainGeometry &geometry);

	/// Constrained Delaunay mesh of the domain with target size h0. Polygon corners,
	/// the physical box and the frame corner lines are mesh vertices/edges; every
	/// polygon edge carries at least one interior vertex. `seed` drives the lattice jitter.
	Mesh2D build_domain_mesh(const DomainGeometry &geometry, double h0, unsigned seed = 12345);

	/// Structured n x n grid of (-half, half)^2, two right triangles per
	/// cell sharing the cell diagonal as refinement edge. Triangles whose centroid
	/// lies in (-metal_half, metal_half)^2 are Metal; metal_half must fall on grid lines.
	Mesh2D square_mesh(int n, double half, double metal_half);

	/// Lower-level entry point: Delaunay triangulation of `points` with the given
	/// segments (pairs of point indices) recovered as edges. Points must cover
	/// the corners of their bounding box. Triangles are counter-clockwise.
	std::vector<std::array<int, 3>> constrained_delaunay(const std::vector<Vec2> &points,
	                                                     const std::vector<std::array<int, 2>> &segments);
} // namespace nhd
