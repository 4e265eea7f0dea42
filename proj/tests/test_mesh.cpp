#include <doctest.h>

#include <nhd/bench.hpp>
#include <nhd/mesh_io.hpp>
#include <nhd/meshgen.hpp>
#include <nhd/refine.hpp>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

using namespace nhd;

namespace
{
	std::set<std::array<int, 3>> sorted_triangles(const Mesh2D &m)
	{
		std::set<std::array<int, 3>> s;
		for (auto t : m.triangles())
		{
			std::sort(t.begin(), t.end());
			s.insert(t);
		}
		return s;
	}

	Mesh2D unit_square(int n) { return square_mesh(n, 0.5, 0.25); }

	SizeField current_sizes(const Mesh2D &m)
	{
		SizeField f{std::vector<double>(m.num_vertices(), 0.0)};
		for (int t = 0; t < m.num_triangles(); ++t)
			for (int v : m.triangle(t))
				f.sizes[v] = std::max(f.sizes[v], m.geometry(t).diameter);
		return f;
	}
} // namespace

TEST_CASE("geometry of a right triangle")
{
	const auto g = triangle_geometry(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1));
	CHECK(g.diameter == doctest::Approx(std::sqrt(2.0)));
	CHECK(g.inradius == doctest::Approx((2 - std::sqrt(2.0)) / 2));
	CHECK(g.area == doctest::Approx(0.5));
	// Outward normals are unit and orthogonal to their edges.
	for (int i = 0; i < 3; ++i)
	{
		CHECK(g.normals[i].norm() == doctest::Approx(1.0));
		CHECK(std::abs(g.normals[i].dot(g.tangents[i])) < 1e-14);
		CHECK(g.normals[i].dot(g.barycenter - (i == 0 ? Vec2(1, 0) : Vec2(0, 0))) < 0);
	}
}

TEST_CASE("geometry of an equilateral triangle")
{
	const auto g = triangle_geometry(Vec2(0, 0), Vec2(1, 0), Vec2(0.5, std::sqrt(3.0) / 2));
	CHECK(g.diameter == doctest::Approx(1.0));
	CHECK(g.inradius == doctest::Approx(1 / (2 * std::sqrt(3.0))));
	CHECK(g.shape_ratio() == doctest::Approx(2 * std::sqrt(3.0)));
}

TEST_CASE("shape ratio is at least 2 sqrt 3 on random triangles")
{
	std::mt19937 rng(7);
	std::uniform_real_distribution<double> u(-1, 1);
	int checked = 0;
	while (checked < 2000)
	{
		Vec2 a(u(rng), u(rng)), b(u(rng), u(rng)), c(u(rng), u(rng));
		const double s = cross2(b - a, c - a);
		if (std::abs(s) < 1e-3)
			continue;
		if (s < 0)
			std::swap(b, c);
		CHECK(triangle_geometry(a, b, c).shape_ratio() >= 2 * std::sqrt(3.0) - 1e-12);
		++checked;
	}
}

TEST_CASE("square inclusion areas are forced by the geometry")
{
	// Omega = (-6, 6)^2: physical box L = 4 plus a 2 nm frame.
	const DomainGeometry geo{{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}}, 4, 2};
	const Mesh2D m = build_domain_mesh(geo, 1.0);
	CHECK(audit(m) == "");
	CHECK(m.total_area() == doctest::Approx(144).epsilon(1e-12));
	CHECK(m.area(Region::Metal) == doctest::Approx(4).epsilon(1e-12));
	CHECK(m.area(Region::PML) == doctest::Approx(144 - 64).epsilon(1e-12));
	for (int t = 0; t < m.num_triangles(); ++t)
	{
		const Vec2 &b = m.geometry(t).barycenter;
		const bool frame = b.cwiseAbs().maxCoeff() > 4;
		const bool metal = b.cwiseAbs().maxCoeff() < 1;
		CHECK((m.region(t) == Region::PML) == frame);
		CHECK(m.is_metal(t) == metal);
	}
}

TEST_CASE("scenario meshes resolve the metal polygons")
{
	for (const auto &name : scenario_names())
	{
		CAPTURE(name);
		const auto spec = scenario(name);
		const Mesh2D m = build_domain_mesh(spec.domain(), spec.h0);
		CHECK(audit(m) == "");
		double poly_area = 0;
		for (const auto &p : spec.metal)
			poly_area += std::abs(signed_area(p));
		CHECK(m.area(Region::Metal) == doctest::Approx(poly_area).epsilon(1e-12));
		const double R = spec.half_width + spec.layer;
		CHECK(m.total_area() == doctest::Approx(4 * R * R).epsilon(1e-12));
		// Every polygon corner is a mesh vertex.
		for (const auto &p : spec.metal)
			for (const Vec2 &c : p)
			{
				int hits = 0;
				for (const Vec2 &v : m.vertices())
					hits += (v - c).norm() < 1e-12;
				CHECK(hits == 1);
			}
	}
	CHECK(scenario("bowtie").metal.size() == 1);
	CHECK(scenario("nanotip").metal[0].size() == 3);
}

TEST_CASE("bowtie metal has a 6 nm by 6 nm bounding box")
{
	const auto spec = scenario("bowtie");
	Vec2 lo = Vec2::Constant(1e9), hi = Vec2::Constant(-1e9);
	for (const Vec2 &c : spec.metal[0])
	{
		lo = lo.cwiseMin(c);
		hi = hi.cwiseMax(c);
	}
	CHECK((hi - lo).isApprox(Vec2(6, 6)));
	CHECK(spec.half_width == 6);
	CHECK(spec.layer == 4);
}

TEST_CASE("invalid geometries are rejected")
{
	CHECK_THROWS_AS(build_domain_mesh({{{{0, 0}, {1, 0}, {2, 0}}}, 6, 4}, 1.0), GeometryError);
	CHECK_THROWS_AS(build_domain_mesh({{{{0, 0}, {1, 1}, {1, 0}, {0, 1}}}, 6, 4}, 1.0), GeometryError);
	CHECK_THROWS_AS(build_domain_mesh({{{{0, 0}, {7, 0}, {0, 1}}}, 6, 4}, 1.0), GeometryError);
	CHECK_THROWS_AS(build_domain_mesh({{{{0, 0}, {1, 0}, {0, 1}}}, 6, 4}, 0.0), GeometryError);
	CHECK_THROWS_AS(build_domain_mesh({{{{0, 0}, {1, 0}, {0, 1}}}, 6, 4}, -1.0), GeometryError);
}

TEST_CASE("refining to the current sizes leaves the mesh unchanged")
{
	const Mesh2D m = build_domain_mesh(scenario("nanotip").domain(), 1.5);
	const Mesh2D r = refine(m, current_sizes(m));
	CHECK(r.num_triangles() == m.num_triangles());
	CHECK(sorted_triangles(r) == sorted_triangles(m));
}

TEST_CASE("halving one vertex size refines its star plus closure only")
{
	const Mesh2D m = unit_square(8);
	auto sizes = current_sizes(m);
	const int a = 40; // interior vertex
	sizes.sizes[a] *= 0.5;
	const Mesh2D r = refine(m, sizes);
	CHECK(audit(r) == "");

	// Every coarse triangle in the star of a was subdivided.
	const auto kept = sorted_triangles(r);
	const auto stars = m.vertex_stars();
	for (int t : stars[a])
	{
		auto tri = m.triangle(t);
		std::sort(tri.begin(), tri.end());
		CHECK(kept.count(tri) == 0);
		for (const auto &t2 : r.triangles())
		{
			// Children of t have diameter at most the requested size at a.
			const Vec2 c = (r.vertex(t2[0]) + r.vertex(t2[1]) + r.vertex(t2[2])) / 3;
			const auto &g = m.geometry(t);
			const Vec2 l = g.jacobian.inverse() * (c - m.vertex(m.triangle(t)[0]));
			if (l.minCoeff() > 1e-12 && l.sum() < 1 - 1e-12)
				CHECK(triangle_geometry(r.vertex(t2[0]), r.vertex(t2[1]), r.vertex(t2[2])).diameter <=
				      sizes.sizes[a] + 1e-12);
		}
	}
	// Refinement stays local: triangles far away from a are untouched.
	for (int t = 0; t < m.num_triangles(); ++t)
		if ((m.geometry(t).barycenter - m.vertex(a)).norm() > 0.5)
		{
			auto tri = m.triangle(t);
			std::sort(tri.begin(), tri.end());
			CHECK(kept.count(tri) == 1);
		}
}

TEST_CASE("refined sizes honour the vertex size field")
{
	const Mesh2D m = build_domain_mesh(scenario("bowtie").domain(), 2.0);
	std::mt19937 rng(3);
	std::uniform_real_distribution<double> u(0.3, 1.0);
	auto sizes = current_sizes(m);
	for (double &s : sizes.sizes)
		s *= u(rng);
	const Mesh2D r = refine(m, sizes);
	CHECK(audit(r) == "");
	// Locate each child in its parent and compare with the max vertex size there.
	for (int t2 = 0; t2 < r.num_triangles(); ++t2)
	{
		const Vec2 c = r.geometry(t2).barycenter;
		for (int t = 0; t < m.num_triangles(); ++t)
		{
			const Vec2 l = m.geometry(t).jacobian.inverse() * (c - m.vertex(m.triangle(t)[0]));
			if (l.minCoeff() < -1e-12 || l.sum() > 1 + 1e-12)
				continue;
			double bound = 0;
			for (int v : m.triangle(t))
				bound = std::max(bound, sizes.sizes[v]);
			CHECK(r.geometry(t2).diameter <= bound + 1e-12);
			CHECK(r.geometry(t2).diameter <= m.geometry(t).diameter + 1e-12);
			CHECK(r.region(t2) == m.region(t));
			break;
		}
	}
}

TEST_CASE("repeated global halving shrinks the diameter")
{
	const Mesh2D m = build_domain_mesh(scenario("vgroove").domain(), 2.0);
	const double h = m.max_diameter();
	Mesh2D r = m;
	for (int n = 1; n <= 4; ++n)
	{
		r = refine_to_size(r, h / std::pow(2.0, n));
		CHECK(r.max_diameter() <= h / std::pow(2.0, n - 1));
		CHECK(audit(r) == "");
	}
}

TEST_CASE("bisection keeps conformity, areas and shape regularity")
{
	const Mesh2D m = build_domain_mesh(scenario("bowtie").domain(), 1.5);
	const double shape0 = m.max_shape_ratio();
	Mesh2D r = m;
	std::mt19937 rng(11);
	for (int k = 0; k < 6; ++k)
	{
		auto sizes = current_sizes(r);
		std::uniform_int_distribution<int> pick(0, r.num_vertices() - 1);
		for (int j = 0; j < 10; ++j)
			sizes.sizes[pick(rng)] *= 0.5;
		r = refine(r, sizes);
		CHECK(audit(r) == "");
		for (auto reg : {Region::Vacuum, Region::Metal, Region::PML})
			CHECK(r.area(reg) == doctest::Approx(m.area(reg)).epsilon(1e-12));
		// Newest-vertex bisection visits finitely many similarity classes.
		CHECK(r.max_shape_ratio() <= 4 * shape0);
	}
}

TEST_CASE("two global bisections quadruple the element count")
{
	const Mesh2D m = unit_square(4);
	const Mesh2D r = bisect_all(bisect_all(m));
	CHECK(r.num_triangles() == 4 * m.num_triangles());
	CHECK(audit(r) == "");
}

TEST_CASE("edge adjacency")
{
	const Mesh2D m = build_domain_mesh(scenario("nanotip").domain(), 1.5);
	int boundary = 0;
	for (const Edge &e : m.edges())
	{
		const Vec2 mid = 0.5 * (m.vertex(e.vertices[0]) + m.vertex(e.vertices[1]));
		const bool outer = std::abs(mid.cwiseAbs().maxCoeff() - 10) < 1e-12;
		CHECK(e.on_boundary() == outer);
		boundary += outer;
	}
	CHECK(boundary > 0);
	// Metal-boundary edges separate one metal and one non-metal triangle.
	for (int e = 0; e < m.num_edges(); ++e)
		if (m.on_metal_boundary(e))
			CHECK(m.is_metal(m.edge(e).triangles[0]) != m.is_metal(m.edge(e).triangles[1]));
}

TEST_CASE("VTK round trip")
{
	const Mesh2D m = refine_to_size(build_domain_mesh(scenario("vgroove").domain(), 2.0), 1.0);
	std::stringstream s;
	write_vtk(s, m, {{"one", std::vector<double>(m.num_vertices(), 1.0)}},
	          {{"two", std::vector<double>(m.num_triangles(), 2.0)}});
	const Mesh2D r = read_vtk(s);
	CHECK(r.num_vertices() == m.num_vertices());
	CHECK(r.triangles() == m.triangles());
	CHECK(r.regions() == m.regions());
	for (int v = 0; v < m.num_vertices(); ++v)
		CHECK((r.vertex(v) - m.vertex(v)).norm() < 1e-12 * (1 + m.vertex(v).norm()));
}

TEST_CASE("seed changes the lattice but not the geometry")
{
	const auto geo = scenario("bowtie").domain();
	const Mesh2D a = build_domain_mesh(geo, 1.5, 1), b = build_domain_mesh(geo, 1.5, 2);
	CHECK(a.vertices() != b.vertices());
	CHECK(a.area(Region::Metal) == doctest::Approx(b.area(Region::Metal)).epsilon(1e-12));
	const Mesh2D c = build_domain_mesh(geo, 1.5, 1);
	CHECK(a.vertices() == c.vertices());
}
