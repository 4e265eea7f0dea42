#include <nhd/mesh.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

namespace nhd
{
	std::string_view to_string(Region r)
	{
		switch (r)
		{
		case Region::Vacuum: return "vacuum";
		case Region::Metal: return "metal";
		case Region::PML: return "pml";
		}
		return "unknown";
	}

	TriangleGeometry triangle_geometry(const Vec2 &a, const Vec2 &b, const Vec2 &c)
	{
		TriangleGeometry g;
		const std::array<Vec2, 3> p{a, b, c};
		g.jacobian.col(0) = b - a;
		g.jacobian.col(1) = c - a;
		g.area = 0.5 * g.jacobian.determinant();
		g.barycenter = (a + b + c) / 3.0;
		double perimeter = 0;
		for (int i = 0; i < 3; ++i)
		{
			const Vec2 d = p[(i + 2) % 3] - p[(i + 1) % 3];
			const double len = d.norm();
			g.edge_lengths[i] = len;
			g.tangents[i] = d / len;
			g.normals[i] = Vec2(g.tangents[i](1), -g.tangents[i](0));
			perimeter += len;
		}
		g.diameter = *std::max_element(g.edge_lengths.begin(), g.edge_lengths.end());
		g.inradius = 2.0 * g.area / perimeter;
		return g;
	}

	namespace
	{
		std::uint64_t edge_key(int a, int b)
		{
			if (a > b)
				std::swap(a, b);
			return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
		}
	} // namespace

	Mesh2D::Mesh2D(std::vector<Vec2> vertices, std::vector<Triangle> triangles, std::vector<Region> regions)
		: vertices_(std::move(vertices)), triangles_(std::move(triangles)), regions_(std::move(regions))
	{
		if (regions_.size() != triangles_.size())
			throw GeometryError("region tag count does not match triangle count");
		build();
	}

	void Mesh2D::build()
	{
		const int nt = num_triangles();
		geometry_.resize(nt);
		triangle_edges_.resize(nt);
		edges_.clear();

		std::unordered_map<std::uint64_t, int> lookup;
		lookup.reserve(3 * nt);
		for (int t = 0; t < nt; ++t)
		{
			const auto &tri = triangles_[t];
			for (int v : tri)
				if (v < 0 || v >= num_vertices())
					throw GeometryError("triangle " + std::to_string(t) + " references a missing vertex");

			geometry_[t] = triangle_geometry(vertices_[tri[0]], vertices_[tri[1]], vertices_[tri[2]]);
			if (!(geometry_[t].area > 0))
				throw GeometryError("triangle " + std::to_string(t) + " is degenerate or clockwise");

			for (int i = 0; i < 3; ++i)
			{
				const int a = tri[(i + 1) % 3], b = tri[(i + 2) % 3];
				auto [it, inserted] = lookup.try_emplace(edge_key(a, b), num_edges());
				if (inserted)
				{
					Edge e;
					e.vertices = {std::min(a, b), std::max(a, b)};
					e.triangles[0] = t;
					e.local_index[0] = i;
					edges_.push_back(e);
				}
				else
				{
					Edge &e = edges_[it->second];
					if (e.triangles[1] >= 0)
						throw GeometryError("edge (" + std::to_string(a) + ", " + std::to_string(b) + ") has more than two triangles");
					e.triangles[1] = t;
					e.local_index[1] = i;
				}
				triangle_edges_[t][i] = it->second;
			}
		}
	}

	bool Mesh2D::edge_reversed(int t, int local) const
	{
		const auto &tri = triangles_[t];
		return tri[(local + 1) % 3] > tri[(local + 2) % 3];
	}

	bool Mesh2D::on_metal_boundary(int e) const
	{
		const Edge &ed = edges_[e];
		const bool m0 = is_metal(ed.triangles[0]);
		const bool m1 = ed.triangles[1] >= 0 && is_metal(ed.triangles[1]);
		return m0 != m1;
	}

	bool Mesh2D::metal_interior(int e) const
	{
		const Edge &ed = edges_[e];
		return ed.triangles[1] >= 0 && is_metal(ed.triangles[0]) && is_metal(ed.triangles[1]);
	}

	std::vector<std::vector<int>> Mesh2D::vertex_stars() const
	{
		std::vector<std::vector<int>> stars(vertices_.size());
		for (int t = 0; t < num_triangles(); ++t)
			for (int v : triangles_[t])
				stars[v].push_back(t);
		return stars;
	}

	double Mesh2D::area(Region r) const
	{
		double s = 0;
		for (int t = 0; t < num_triangles(); ++t)
			if (regions_[t] == r)
				s += geometry_[t].area;
		return s;
	}

	double Mesh2D::total_area() const
	{
		double s = 0;
		for (const auto &g : geometry_)
			s += g.area;
		return s;
	}

	double Mesh2D::max_diameter() const
	{
		double h = 0;
		for (const auto &g : geometry_)
			h = std::max(h, g.diameter);
		return h;
	}

	double Mesh2D::max_shape_ratio() const
	{
		double k = 0;
		for (const auto &g : geometry_)
			k = std::max(k, g.shape_ratio());
		return k;
	}

	int Mesh2D::num_metal_triangles() const
	{
		return static_cast<int>(std::count(regions_.begin(), regions_.end(), Region::Metal));
	}

	std::string audit(const Mesh2D &mesh)
	{
		std::ostringstream err;
		if (mesh.num_triangles() == 0)
			return "empty mesh";

		Vec2 lo = mesh.vertex(0), hi = mesh.vertex(0);
		for (const auto &v : mesh.vertices())
		{
			lo = lo.cwiseMin(v);
			hi = hi.cwiseMax(v);
		}
		const double scale = (hi - lo).norm();
		const double tol = 1e-12 * scale;

		for (int t = 0; t < mesh.num_triangles(); ++t)
		{
			const auto &g = mesh.geometry(t);
			if (!(g.area > 0) || !(g.inradius > 0))
				err << "triangle " << t << " not positively oriented\n";
		}

		std::vector<int> used(mesh.num_vertices(), 0);
		for (const auto &tri : mesh.triangles())
			for (int v : tri)
				used[v] = 1;
		for (int v = 0; v < mesh.num_vertices(); ++v)
			if (!used[v])
				err << "vertex " << v << " is not referenced\n";

		for (int e = 0; e < mesh.num_edges(); ++e)
		{
			const Edge &ed = mesh.edge(e);
			if (ed.on_boundary())
			{
				const Vec2 &a = mesh.vertex(ed.vertices[0]);
				const Vec2 &b = mesh.vertex(ed.vertices[1]);
				const bool on_box = (std::abs(a(0) - lo(0)) < tol && std::abs(b(0) - lo(0)) < tol) ||
				                    (std::abs(a(0) - hi(0)) < tol && std::abs(b(0) - hi(0)) < tol) ||
				                    (std::abs(a(1) - lo(1)) < tol && std::abs(b(1) - lo(1)) < tol) ||
				                    (std::abs(a(1) - hi(1)) < tol && std::abs(b(1) - hi(1)) < tol);
				if (!on_box)
					err << "edge " << e << " has one triangle but is interior (hanging vertex)\n";
			}
			else
			{
				// Opposite traversal directions in the two neighbours.
				const bool r0 = mesh.edge_reversed(ed.triangles[0], ed.local_index[0]);
				const bool r1 = mesh.edge_reversed(ed.triangles[1], ed.local_index[1]);
				if (r0 == r1)
					err << "edge " << e << " is traversed in the same direction by both triangles\n";
			}
		}

		const double box = (hi(0) - lo(0)) * (hi(1) - lo(1));
		if (std::abs(mesh.total_area() - box) > 1e-10 * box)
			err << "triangle areas sum to " << mesh.total_area() << " instead of " << box << "\n";
		return err.str();
	}
} // namespace nhd
