#pragma once

#include "types.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace nhd
{
	enum class Region : std::uint8_t
	{
		Vacuum = 0,
		Metal = 1,
		PML = 2
	};

	std::string_view to_string(Region r);

	/// Per-triangle geometric quantities. Local edge i is opposite local vertex i
	/// and runs from vertex i+1 to vertex i+2 (counter-clockwise).
	struct TriangleGeometry
	{
		double diameter = 0; ///< h_K
		double inradius = 0; ///< rho_K
		double area = 0;
		std::array<double, 3> edge_lengths{};
		std::array<Vec2, 3> normals;  ///< outward unit normals
		std::array<Vec2, 3> tangents; ///< counter-clockwise unit tangents
		Mat2 jacobian;                ///< x = v0 + jacobian * xhat on the unit triangle
		Vec2 barycenter;

		double shape_ratio() const { return diameter / inradius; }
	};

	TriangleGeometry triangle_geometry(const Vec2 &a, const Vec2 &b, const Vec2 &c);

	struct Edge
	{
		std::array<int, 2> vertices;          ///< sorted, vertices[0] < vertices[1]
		std::array<int, 2> triangles{-1, -1}; ///< triangles[1] == -1 on the outer boundary
		std::array<int, 2> local_index{-1, -1};

		bool on_boundary() const { return triangles[1] < 0; }
	};

	/// Conforming, counter-clockwise triangle mesh with region tags.
	///
	/// Vertex 0 of each triangle is its newest vertex; the opposite edge (local
	/// edge 0) is the refinement edge used by bisection.
	class Mesh2D
	{
	public:
		using Triangle = std::array<int, 3>;

		Mesh2D() = default;
		Mesh2D(std::vector<Vec2> vertices, std::vector<Triangle> triangles, std::vector<Region> regions);

		int num_vertices() const { return static_cast<int>(vertices_.size()); }
		int num_triangles() const { return static_cast<int>(triangles_.size()); }
		int num_edges() const { return static_cast<int>(edges_.size()); }

		const std::vector<Vec2> &vertices() const { return vertices_; }
		const std::vector<Triangle> &triangles() const { return triangles_; }
		const std::vector<Region> &regions() const { return regions_; }
		const std::vector<Edge> &edges() const { return edges_; }

		const Vec2 &vertex(int v) const { return vertices_[v]; }
		const Triangle &triangle(int t) const { return triangles_[t]; }
		Region region(int t) const { return regions_[t]; }
		bool is_metal(int t) const { return regions_[t] == Region::Metal; }
		const Edge &edge(int e) const { return edges_[e]; }

		/// Edge ids of triangle t, local edge i opposite local vertex i.
		const std::array<int, 3> &triangle_edges(int t) const { return triangle_edges_[t]; }

		/// True when the local edge runs against the global low-to-high orientation.
		bool edge_reversed(int t, int local) const;

		/// Edge separating a metal triangle from a non-metal one.
		bool on_metal_boundary(int e) const;
		/// Edge whose two neighbours are both metal.
		bool metal_interior(int e) const;

		const TriangleGeometry &geometry(int t) const { return geometry_.at(t); }

		/// Triangles incident to each vertex.
		std::vector<std::vector<int>> vertex_stars() const;

		double area(Region r) const;
		double total_area() const;
		double max_diameter() const;
		double max_shape_ratio() const;
		int num_metal_triangles() const;

	private:
		void build();

		std::vector<Vec2> vertices_;
		std::vector<Triangle> triangles_;
		std::vector<Region> regions_;
		std::vector<Edge> edges_;
		std::vector<std::array<int, 3>> triangle_edges_;
		std::vector<TriangleGeometry> geometry_;
	};

	/// Exhaustive audit used by tests: edge adjacency, orientation, conformity.
	/// Returns an empty string when the mesh is valid, otherwise a description.
	std::string audit(const Mesh2D &mesh);
} // namespace nhd
