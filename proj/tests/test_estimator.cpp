#include <doctest.h>

#include "estimator_oracle.hpp"

#include <nhd/bench.hpp>
#include <nhd/meshgen.hpp>
#include <nhd/reference.hpp>

#include <random>
#include <sstream>

using namespace nhd;

namespace
{
	const Complex I(0, 1);

	CVector random_coefficients(int n, std::mt19937 &rng)
	{
		std::normal_distribution<double> g;
		CVector x(n);
		for (int i = 0; i < n; ++i)
			x(i) = Complex(g(rng), g(rng));
		return x;
	}

	// Two unit right triangles sharing the diagonal from (1, 0) to (0, 1).
	Mesh2D two_triangles(Region r1, Region r2)
	{
		return Mesh2D({{0, 0}, {1, 0}, {0, 1}, {1, 1}}, {{0, 1, 2}, {1, 3, 2}}, {r1, r2});
	}

	CoefficientField manual_field(const Mesh2D &m, double omega)
	{
		CoefficientField f;
		f.omega = omega;
		f.elements.resize(m.num_triangles());
		for (int t = 0; t < m.num_triangles(); ++t)
		{
			auto &c = f.elements[t];
			if (m.is_metal(t))
			{
				c.alpha = (CMat2() << Complex(1, 0.1), 0, 0, Complex(1, 0.1)).finished();
				c.zeta = 0.01;
			}
			c.update_stars();
		}
		return f;
	}
} // namespace

TEST_CASE("independent oracle agrees on random discrete solutions")
{
	std::mt19937 rng(2024);
	const char *names[] = {"nanotip", "bowtie"};
	double worst = 0;
	for (int trial = 0; trial < 50; ++trial)
	{
		const int p = trial % 4;
		const auto spec = scenario(names[trial / 4 % 2]);
		const Mesh2D m = build_domain_mesh(spec.domain(), 3.0, 100 + trial);
		const SpacePair s(m, p);
		const auto prob = make_problem(spec, spec.frequencies[trial % spec.frequencies.size()]);
		const auto coeffs = prob.coefficients(m);
		const SolutionPair u(m, s, random_coefficients(s.size(), rng));

		std::vector<ElementEstimate> lib(m.num_triangles());
		for (int t = 0; t < m.num_triangles(); ++t)
			lib[t] = estimate_element(u, coeffs, prob.sources, t);
		const double dev = oracle::max_relative_deviation(lib, oracle::estimate_all(u, coeffs, prob.sources));
		CAPTURE(trial);
		CHECK(dev <= 1e-8);
		worst = std::max(worst, dev);
	}
	MESSAGE("largest relative deviation " << worst);
}

TEST_CASE("zero solution with zero data has no residual")
{
	const Mesh2D m = square_mesh(4, 1.0, 0.5);
	const SpacePair s(m, 2);
	const auto c = manual_field(m, 0.9);
	const SolutionPair u(m, s, CVector::Zero(s.size()));
	const auto b = estimate(u, c, {});
	CHECK(b.eta() == 0);
	for (double o : b.osc)
		CHECK(o == 0);
}

TEST_CASE("gradient fields leave no curl-curl residual at zero frequency")
{
	const Mesh2D m = square_mesh(4, 1.0, 0.5);
	const SpacePair s(m, 3);
	const auto c = manual_field(m, 0.0);
	// E = grad((1 - x^2)(1 - y^2)) lies in the degree-3 edge space.
	const auto e = [](const Vec2 &x) {
		return CVec2(-2 * x(0) * (1 - x(1) * x(1)), -2 * x(1) * (1 - x(0) * x(0)));
	};
	const auto zero = [](const Vec2 &) { return CVec2::Zero().eval(); };
	const auto rotated = [&](const Vec2 &x) { return CVec2(rot90(e(x).real()).cast<Complex>()); };
	const SolutionPair u(m, s, interpolate(m, s, e, zero)), v(m, s, interpolate(m, s, rotated, zero));
	double control = 0;
	for (int t = 0; t < m.num_triangles(); ++t)
	{
		CHECK(eta_curl_curl(u, c, {}, t) <= 1e-9);
		control += eta_curl_curl(v, c, {}, t);
	}
	CHECK(control > 1); // the rotated field is not a gradient
}

TEST_CASE("hand-computed jumps across one edge")
{
	// p = 0, only the shared-edge dof set. On T1 the field is kappa (-y, x), on
	// T2 it is kappa (y - 1, 1 - x): curl 2 kappa and -2 kappa, the tangential
	// trace agrees and the normal trace is +-kappa (x - y) / sqrt(2).
	const Mesh2D m = two_triangles(Region::Vacuum, Region::Vacuum);
	const SpacePair s(m, 0);
	REQUIRE(s.num_e() == 1); // boundary edges are eliminated
	CVector x = CVector::Zero(s.size());
	x(0) = 1;
	const SolutionPair u(m, s, x);

	// kappa from a point value on T1: (0.25, 0.25) maps to itself.
	const CVec2 probe = u.e_at(0, Vec2(0.25, 0.25)).value;
	const double kappa = std::abs(probe(1) / 0.25);
	REQUIRE(std::abs(probe(0) + probe(1)) < 1e-14);

	const double omega = 0.7;
	auto c = manual_field(m, omega);
	c.elements[1].eps = 4 * CMat2::Identity();
	c.elements[1].update_stars();

	const double h = std::sqrt(2.0), sh = std::sqrt(h);
	const double vol = kappa * std::sqrt(1.0 / 6); // ||E||_{L2(T)} on either triangle
	const double jump_cc = kappa * std::sqrt(16 * std::sqrt(2.0));
	const double jump_div = kappa * std::sqrt(25 * std::sqrt(2.0) / 6);
	const double w2 = omega * omega;

	CHECK(eta_curl_curl(u, c, {}, 0) == doctest::Approx(h * w2 * vol + sh * jump_cc).epsilon(1e-12));
	CHECK(eta_curl_curl(u, c, {}, 1) == doctest::Approx(h * w2 * 4 * vol + sh * jump_cc).epsilon(1e-12));
	CHECK(eta_div(u, c, {}, 0) == doctest::Approx(omega * sh * jump_div).epsilon(1e-12));
	CHECK(eta_div(u, c, {}, 1) == doctest::Approx(omega * sh * jump_div / 2).epsilon(1e-12));
}

TEST_CASE("metal-only terms")
{
	const Mesh2D m = two_triangles(Region::Metal, Region::Vacuum);
	const SpacePair s(m, 1);
	const auto c = manual_field(m, 0.8);
	std::mt19937 rng(3);
	const SolutionPair u(m, s, random_coefficients(s.size(), rng));
	CHECK_THROWS_AS(eta_grad_div(u, c, {}, 1), ContractViolation);
	CHECK_THROWS_AS(eta_curl(u, c, {}, 1), ContractViolation);
	CHECK_NOTHROW(eta_grad_div(u, c, {}, 0));
	const auto e = estimate_element(u, c, {}, 1);
	CHECK(e.grad_div == 0);
	CHECK(e.curl == 0);
	// The only edge of the metal triangle is on the metal boundary: no J jumps.
	const auto fields = std::vector<oracle::Fields>{oracle::fields_of(u, 0), oracle::fields_of(u, 1)};
	const auto o = oracle::estimate(u, c, {}, fields, 0);
	CHECK(estimate_element(u, c, {}, 0).grad_div == doctest::Approx(o.grad_div).epsilon(1e-9));
}

TEST_CASE("estimator is absolutely homogeneous")
{
	const auto spec = scenario("nanotip");
	const Mesh2D m = build_domain_mesh(spec.domain(), 3.0);
	const SpacePair s(m, 1);
	const auto prob = make_problem(spec, 1.0);
	const auto coeffs = prob.coefficients(m);
	std::mt19937 rng(9);
	const CVector x = random_coefficients(s.size(), rng);
	const Complex lambda(3, -2);
	REQUIRE(!prob.sources.current); // scattering drives the metal only
	SourceTerms scaled;
	scaled.drive = [&](const Vec2 &p) { return CVec2(lambda * prob.sources.drive(p)); };
	scaled.drive_curl = [&](const Vec2 &p) { return lambda * prob.sources.drive_curl(p); };
	const SolutionPair u(m, s, x), v(m, s, lambda * x);
	const auto a = estimate(u, coeffs, prob.sources), b = estimate(v, coeffs, scaled);
	for (int t = 0; t < m.num_triangles(); ++t)
	{
		CHECK(b.elements[t].total() == doctest::Approx(std::abs(lambda) * a.elements[t].total()).epsilon(1e-12));
		CHECK(b.osc[t] == doctest::Approx(std::abs(lambda) * a.osc[t]).epsilon(1e-10));
	}
}

TEST_CASE("estimator does not depend on vertex numbering")
{
	const auto spec = scenario("nanotip");
	const Mesh2D m = build_domain_mesh(spec.domain(), 3.0);
	// Reverse the vertex numbering: every global edge flips its orientation.
	const int nv = m.num_vertices();
	std::vector<Vec2> verts(nv);
	for (int v = 0; v < nv; ++v)
		verts[nv - 1 - v] = m.vertex(v);
	std::vector<Mesh2D::Triangle> tris;
	std::vector<Region> regions;
	for (int t = 0; t < m.num_triangles(); ++t)
	{
		const auto &tri = m.triangle(t);
		tris.push_back({nv - 1 - tri[1], nv - 1 - tri[2], nv - 1 - tri[0]});
		regions.push_back(m.region(t));
	}
	const Mesh2D f(verts, tris, regions);
	const auto prob = make_problem(spec, 1.3);
	const SpacePair sm(m, 1), sf(f, 1);
	const auto cm = prob.coefficients(m), cf = prob.coefficients(f);
	const SolutionPair um(m, sm, solve_problem(m, sm, cm, prob.sources).coefficients);
	const SolutionPair uf(f, sf, solve_problem(f, sf, cf, prob.sources).coefficients);
	const auto a = estimate(um, cm, prob.sources), b = estimate(uf, cf, prob.sources);
	for (int t = 0; t < m.num_triangles(); ++t)
		CHECK(b.elements[t].total() == doctest::Approx(a.elements[t].total()).epsilon(1e-7));
	CHECK(b.eta() == doctest::Approx(a.eta()).epsilon(1e-8));
}

TEST_CASE("global totals")
{
	EstimatorBreakdown one;
	one.elements.push_back({1, 2, 3, 4});
	CHECK(one.eta() == doctest::Approx(10));
	CHECK(one.eta_k().front() == 10);

	EstimatorBreakdown b;
	b.elements = {{3, 0, 0, 0}, {0, 1, 3, 0}};
	CHECK(b.eta() == doctest::Approx(5));
	CHECK(b.eta_curl_curl() == doctest::Approx(3));
	CHECK(b.eta_div() == doctest::Approx(3));
	std::swap(b.elements[0], b.elements[1]);
	CHECK(b.eta() == doctest::Approx(5));
	const double v[] = {3, 4, 12};
	CHECK(root_sum_square(v) == doctest::Approx(13));
}

TEST_CASE("oscillation vanishes on polynomial data of degree p + 1")
{
	const Mesh2D m = square_mesh(4, 1.0, 0.5);
	const auto c = manual_field(m, 0.9);
	for (int p = 0; p <= 2; ++p)
	{
		CAPTURE(p);
		const int q = p + 1;
		SourceTerms src;
		// (x^q + i y, y^q + x) and (y^q, 2 x^q): derivatives written out by hand.
		src.current = [q](const Vec2 &x) { return CVec2(std::pow(x(0), q) + I * x(1), std::pow(x(1), q) + x(0)); };
		src.current_div = [q](const Vec2 &x) {
			return Complex(q * std::pow(x(0), q - 1) + q * std::pow(x(1), q - 1));
		};
		src.drive = [q](const Vec2 &x) { return CVec2(std::pow(x(1), q), 2 * std::pow(x(0), q)); };
		src.drive_curl = [q](const Vec2 &x) {
			return Complex(2 * q * std::pow(x(0), q - 1) - q * std::pow(x(1), q - 1));
		};
		for (int t = 0; t < m.num_triangles(); ++t)
			CHECK(oscillation(m, c, src, p, t) <= 1e-10);
	}
}

TEST_CASE("oscillation scales with the data and ignores the drive off the metal")
{
	const Mesh2D m = square_mesh(4, 1.0, 0.5);
	const auto c = manual_field(m, 0.9);
	const PlaneWave w(Vec2(0, 1), Vec2(1, 0), 7.0);
	const SourceTerms base = scattering_sources(w);
	SourceTerms both = base;
	both.current = [&](const Vec2 &x) { return w(x); };
	both.current_div = [](const Vec2 &) { return Complex(0); };
	SourceTerms ten;
	ten.current = [&](const Vec2 &x) { return CVec2(10.0 * both.current(x)); };
	ten.current_div = both.current_div;
	ten.drive = [&](const Vec2 &x) { return CVec2(10.0 * both.drive(x)); };
	ten.drive_curl = [&](const Vec2 &x) { return 10.0 * both.drive_curl(x); };
	for (int t = 0; t < m.num_triangles(); ++t)
	{
		const double o = oscillation(m, c, both, 1, t);
		CHECK(o > 0);
		CHECK(oscillation(m, c, ten, 1, t) == doctest::Approx(10 * o).epsilon(1e-10));
		if (!m.is_metal(t))
			CHECK(oscillation(m, c, base, 1, t) == 0);
		else
			CHECK(oscillation(m, c, base, 1, t) > 0);
	}
}

TEST_CASE("element table")
{
	const Mesh2D m = square_mesh(4, 1.0, 0.5);
	const SpacePair s(m, 0);
	const auto c = manual_field(m, 0.9);
	std::mt19937 rng(4);
	const SolutionPair u(m, s, random_coefficients(s.size(), rng));
	const auto b = estimate(u, c, {});
	std::ostringstream out;
	write_element_csv(out, m, b);
	std::istringstream in(out.str());
	std::string line;
	std::getline(in, line);
	CHECK(line == "element,bx,by,region,h,eta_curl_curl,eta_grad_div,eta_div,eta_curl,eta,osc,xi");
	int rows = 0;
	while (std::getline(in, line))
		++rows;
	CHECK(rows == m.num_triangles());
}
