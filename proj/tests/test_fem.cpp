#include <doctest.h>

#include <nhd/assemble.hpp>
#include <nhd/bench.hpp>
#include <nhd/manufactured.hpp>
#include <nhd/quadrature.hpp>
#include <nhd/refine.hpp>
#include <nhd/solution.hpp>

#include <cmath>
#include <random>
#include <sstream>

using namespace nhd;

namespace
{
	const Complex I(0, 1);

	CVector random_vector(int n, std::mt19937 &rng)
	{
		std::normal_distribution<double> g;
		CVector v(n);
		for (int i = 0; i < n; ++i)
			v(i) = Complex(g(rng), g(rng));
		return v;
	}

	// Small mesh with all three regions: square_mesh plus a frame tag.
	Mesh2D mixed_mesh(int n = 4)
	{
		const Mesh2D base = square_mesh(n, 1.0, 0.5);
		std::vector<Region> regions = base.regions();
		for (int t = 0; t < base.num_triangles(); ++t)
			if (base.geometry(t).barycenter(0) > 0.5)
				regions[t] = Region::PML;
		return Mesh2D(base.vertices(), base.triangles(), regions);
	}

	CoefficientField mixed_coefficients(const Mesh2D &mesh, double omega)
	{
		CoefficientField f;
		f.omega = omega;
		f.elements.resize(mesh.num_triangles());
		for (int t = 0; t < mesh.num_triangles(); ++t)
		{
			auto &c = f.elements[t];
			c.eps = CMat2::Identity();
			c.chi = 1.3;
			if (mesh.region(t) == Region::PML)
			{
				const auto m = apply_pml(c.eps, c.chi, Vec2(0.9, 0.0), 0.5);
				c.eps = m.eps;
				c.chi = m.chi;
			}
			if (mesh.is_metal(t))
			{
				c.alpha = Complex(0.7, 0.1) * CMat2::Identity();
				c.zeta = 0.4;
			}
			c.update_stars();
		}
		return f;
	}

	// b(u, v) by sampling the two discrete pairs at a rule of the given order.
	Complex sesquilinear(const SolutionPair &u, const SolutionPair &v, const CoefficientField &c, int order)
	{
		const Mesh2D &mesh = u.mesh();
		const auto &rule = triangle_rule(order);
		const double w2 = c.omega * c.omega;
		Complex b = 0;
		for (int t = 0; t < mesh.num_triangles(); ++t)
		{
			const double det = 2 * mesh.geometry(t).area;
			for (std::size_t q = 0; q < rule.points.size(); ++q)
			{
				const double w = rule.weights[q] * det;
				const auto eu = u.e_at(t, rule.points[q]), ev = v.e_at(t, rule.points[q]);
				// (a, b) = int a . conj(b)
				const CVec2 evc = ev.value.conjugate();
				Complex s = -w2 * dot2(c[t].eps * eu.value, evc) + c[t].chi * eu.curl * std::conj(ev.curl);
				if (mesh.is_metal(t))
				{
					const auto ju = u.j_at(t, rule.points[q]), jv = v.j_at(t, rule.points[q]);
					const CVec2 jvc = jv.value.conjugate();
					s += I * c.omega * dot2(ju.value, evc);
					s += -w2 * dot2(c[t].alpha * ju.value, jvc) + c[t].zeta * ju.div * std::conj(jv.div);
					s += -I * c.omega * dot2(eu.value, jvc);
				}
				b += w * s;
			}
		}
		return b;
	}

	int interior_edges(const Mesh2D &m)
	{
		int n = 0;
		for (const Edge &e : m.edges())
			n += !e.on_boundary();
		return n;
	}

	int metal_interior_edges(const Mesh2D &m)
	{
		int n = 0;
		for (int e = 0; e < m.num_edges(); ++e)
			n += m.metal_interior(e);
		return n;
	}
} // namespace

TEST_CASE("triangle rules integrate monomials exactly")
{
	// int_T x^a y^b = a! b! / (a + b + 2)!
	auto exact = [](int a, int b) { return std::tgamma(a + 1) * std::tgamma(b + 1) / std::tgamma(a + b + 3); };
	for (int order : {1, 2, 4, 7, 10, 16})
	{
		const auto &r = triangle_rule(order);
		for (int a = 0; a <= order; ++a)
			for (int b = 0; a + b <= order; ++b)
			{
				double s = 0;
				for (std::size_t q = 0; q < r.points.size(); ++q)
					s += r.weights[q] * std::pow(r.points[q](0), a) * std::pow(r.points[q](1), b);
				CHECK(s == doctest::Approx(exact(a, b)).epsilon(1e-13));
			}
	}
}

TEST_CASE("dof counts")
{
	const Mesh2D m = build_domain_mesh(scenario("bowtie").domain(), 2.0);
	for (int p = 0; p <= 3; ++p)
	{
		const SpacePair s(m, p);
		CHECK(s.num_e() == (p + 1) * interior_edges(m) + p * (p + 1) * m.num_triangles());
		CHECK(s.num_j() == (p + 1) * metal_interior_edges(m) + p * (p + 1) * m.num_metal_triangles());
		CHECK(s.local_dim() == (p + 1) * (p + 3));
	}
}

TEST_CASE("discrete fields are conforming")
{
	const Mesh2D m = build_domain_mesh(scenario("nanotip").domain(), 1.5);
	std::mt19937 rng(17);
	for (int p = 0; p <= 3; ++p)
	{
		CAPTURE(p);
		const SpacePair s(m, p);
		const SolutionPair u(m, s, random_vector(s.size(), rng));
		double worst_e = 0, worst_j = 0;
		for (int e = 0; e < m.num_edges(); ++e)
		{
			const Edge &ed = m.edge(e);
			const Vec2 a = m.vertex(ed.vertices[0]), b = m.vertex(ed.vertices[1]);
			const Vec2 tan = (b - a).normalized();
			const Vec2 nor(tan(1), -tan(0));
			for (double s01 : {0.1, 0.37, 0.5, 0.81})
			{
				const Vec2 x = a + s01 * (b - a);
				if (ed.on_boundary())
				{
					const auto v = u.e_at(ed.triangles[0], u.to_reference(ed.triangles[0], x)).value;
					worst_e = std::max(worst_e, std::abs(v.dot(tan.cast<Complex>())));
					continue;
				}
				const int t0 = ed.triangles[0], t1 = ed.triangles[1];
				const auto e0 = u.e_at(t0, u.to_reference(t0, x)).value, e1 = u.e_at(t1, u.to_reference(t1, x)).value;
				const double scale = 1 + e0.norm();
				worst_e = std::max(worst_e, std::abs((e0 - e1).dot(tan.cast<Complex>())) / scale);
				if (m.is_metal(t0) || m.is_metal(t1))
				{
					// Zero extension: normal trace continuous on metal interior edges
					// and vanishing on the metal boundary.
					const auto j0 = u.j_at(t0, u.to_reference(t0, x)).value, j1 = u.j_at(t1, u.to_reference(t1, x)).value;
					worst_j = std::max(worst_j, std::abs((j0 - j1).dot(nor.cast<Complex>())) / (1 + j0.norm() + j1.norm()));
				}
			}
		}
		CHECK(worst_e < 1e-10);
		CHECK(worst_j < 1e-10);
	}
}

TEST_CASE("interpolation reproduces polynomials in the space")
{
	// Tangential trace of E vanishes on the outer boundary of (-1, 1)^2 and the
	// normal trace of J on the metal boundary of (-1/2, 1/2)^2.
	auto e_fix = [](const Vec2 &x) {
		return CVec2(Complex(1, 0.5) * (1 - x(1) * x(1)), Complex(0, 1 - x(0) * x(0)));
	};
	auto j = [](const Vec2 &x) { return CVec2(0.25 - x(0) * x(0), Complex(0, 2) * (0.25 - x(1) * x(1)) * x(0)); };
	const Mesh2D m = ManufacturedProblem::mesh(4);
	std::mt19937 rng(4);
	std::uniform_real_distribution<double> u01(0, 1);
	for (int p = 2; p <= 4; ++p)
	{
		CAPTURE(p);
		const SpacePair s(m, p);
		const SolutionPair u(m, s, interpolate(m, s, e_fix, p >= 3 ? std::function<CVec2(const Vec2 &)>(j) : nullptr));
		for (int t = 0; t < m.num_triangles(); ++t)
			for (int k = 0; k < 4; ++k)
			{
				Vec2 xh(u01(rng), u01(rng));
				if (xh.sum() > 1)
					xh = Vec2(1, 1) - xh;
				const Vec2 x = m.vertex(m.triangle(t)[0]) + m.geometry(t).jacobian * xh;
				CHECK((u.e_at(t, xh).value - e_fix(x)).norm() < 1e-12);
				if (p >= 3 && m.is_metal(t))
					CHECK((u.j_at(t, xh).value - j(x)).norm() < 1e-12);
			}
	}
}

TEST_CASE("matrix reproduces the sesquilinear form")
{
	const Mesh2D m = mixed_mesh();
	const auto c = mixed_coefficients(m, 1.7);
	std::mt19937 rng(21);
	for (int p = 0; p <= 2; ++p)
	{
		CAPTURE(p);
		const SpacePair s(m, p);
		const CSparse A = assemble_matrix(m, c, s);
		CHECK(A.rows() == s.size());
		for (int trial = 0; trial < 3; ++trial)
		{
			const CVector x = random_vector(s.size(), rng);
			const Eigen::VectorXd y = random_vector(s.size(), rng).real();
			const SolutionPair ux(m, s, x), uy(m, s, y.cast<Complex>());
			const Complex direct = y.cast<Complex>().transpose() * (A * x);
			const Complex oracle = sesquilinear(ux, uy, c, 2 * (2 * p + 4));
			CHECK(std::abs(direct - oracle) < 1e-10 * std::abs(oracle));
		}
	}
}

TEST_CASE("coupling blocks are plus and minus i omega times one mixed mass matrix")
{
	const Mesh2D m = mixed_mesh();
	const double omega = 0.9;
	const auto c = mixed_coefficients(m, omega);
	const SpacePair s(m, 1);
	const Eigen::MatrixXcd A(assemble_matrix(m, c, s));
	const auto EJ = A.block(0, s.num_e(), s.num_e(), s.num_j());
	const auto JE = A.block(s.num_e(), 0, s.num_j(), s.num_e());
	const Eigen::MatrixXcd mixed = EJ / (I * omega);
	CHECK(mixed.imag().norm() < 1e-13 * mixed.norm());
	CHECK((JE + I * omega * mixed.transpose()).norm() < 1e-13 * mixed.norm());
	CHECK(mixed.norm() > 0);
}

TEST_CASE("static real problem decouples into two positive semidefinite blocks")
{
	const Mesh2D m = square_mesh(4, 1.0, 0.5);
	CoefficientField c;
	c.omega = 0.0;
	c.elements.resize(m.num_triangles());
	for (int t = 0; t < m.num_triangles(); ++t)
	{
		c.elements[t].chi = 2.0;
		if (m.is_metal(t))
		{
			c.elements[t].alpha = CMat2::Identity();
			c.elements[t].zeta = 0.3;
		}
		c.elements[t].update_stars();
	}
	for (int p = 0; p <= 1; ++p)
	{
		const SpacePair s(m, p);
		const Eigen::MatrixXcd A(assemble_matrix(m, c, s));
		CHECK(A.imag().norm() == 0);
		CHECK(A.block(0, s.num_e(), s.num_e(), s.num_j()).norm() == 0);
		CHECK(A.block(s.num_e(), 0, s.num_j(), s.num_e()).norm() == 0);
		const Eigen::MatrixXd R = A.real();
		CHECK((R - R.transpose()).norm() < 1e-13 * R.norm());
		const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(R).eigenvalues();
		CHECK(ev.minCoeff() > -1e-12 * ev.maxCoeff());
	}
}

TEST_CASE("matrix pattern is symmetric")
{
	const Mesh2D m = build_domain_mesh(scenario("bowtie").domain(), 2.0);
	const auto c = make_problem(scenario("bowtie"), 0.9).coefficients(m);
	const SpacePair s(m, 1);
	const CSparse A = assemble_matrix(m, c, s);
	Eigen::SparseMatrix<double> P(A.rows(), A.cols());
	std::vector<Eigen::Triplet<double>> trip;
	for (int k = 0; k < A.outerSize(); ++k)
		for (CSparse::InnerIterator it(A, k); it; ++it)
			trip.emplace_back(it.row(), it.col(), 1.0);
	P.setFromTriplets(trip.begin(), trip.end());
	const Eigen::SparseMatrix<double> PT = P.transpose();
	CHECK((P - PT).norm() == 0);
}

TEST_CASE("two triangles with one interior edge")
{
	// The lowest-order space has one function: the Whitney form of the diagonal.
	const Mesh2D m({Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)}, {{{0, 1, 2}}, {{0, 2, 3}}},
	               {Region::Vacuum, Region::Vacuum});
	CoefficientField c;
	c.elements.resize(2);
	for (auto &e : c.elements)
		e.update_stars();
	const SpacePair s(m, 0);
	REQUIRE(s.size() == 1);
	c.omega = 0;
	const Complex k = Eigen::MatrixXcd(assemble_matrix(m, c, s))(0, 0);
	c.omega = 1;
	const Complex km = Eigen::MatrixXcd(assemble_matrix(m, c, s))(0, 0);
	const double mass = std::real(k - km);

	// Whitney oracle w = l0 grad l2 - l2 grad l0 on each triangle, where l0, l2
	// are the barycentrics of the diagonal end points: |curl w| = 2 |grad l0 x grad l2|.
	// Per triangle (area 1/2): int |curl w|^2 = 4 * 1/2 = 2, and on the first
	// triangle w = (y, 1 - x), so int |w|^2 = 1/12 + 1/12 (the second is its mirror).
	const double k_oracle = 2 * 2.0, m_oracle = 2 * (1.0 / 6.0);
	CHECK(std::imag(k) == 0);
	CHECK(std::real(k) / mass == doctest::Approx(k_oracle / m_oracle).epsilon(1e-12));
}

TEST_CASE("degenerate triangles are rejected with their id")
{
	try
	{
		Mesh2D m({Vec2(0, 0), Vec2(1, 0), Vec2(2, 0), Vec2(0, 1)}, {{{0, 1, 3}}, {{0, 1, 2}}},
		         {Region::Vacuum, Region::Vacuum});
		FAIL("expected a geometry error");
	}
	catch (const GeometryError &e)
	{
		CHECK(std::string(e.what()).find("triangle 1") != std::string::npos);
	}
}

TEST_CASE("right-hand side")
{
	const Mesh2D m = mixed_mesh();
	const auto c = mixed_coefficients(m, 1.3);
	const SpacePair s(m, 1);
	CHECK(assemble_rhs(m, c, s, SourceTerms{}).norm() == 0);

	// Plane-wave drive only touches the J block.
	const PlaneWave wave(Vec2(0, 1), Vec2(1, 0), 2.0);
	const CVector b = assemble_rhs(m, c, s, scattering_sources(wave));
	CHECK(b.head(s.num_e()).norm() == 0);
	CHECK(b.tail(s.num_j()).norm() > 0);

	// Constant drive on lowest-order RT: i omega K . int psi_i, with the basis
	// integrals taken from point evaluation of unit coefficient vectors.
	const SpacePair s0(m, 0);
	const CVec2 K(Complex(0.3, -1), 2.0);
	SourceTerms src;
	src.drive = [&](const Vec2 &) { return K; };
	const CVector b0 = assemble_rhs(m, c, s0, src);
	const auto &rule = triangle_rule(2);
	for (int i = s0.num_e(); i < s0.size(); ++i)
	{
		CVector unit = CVector::Zero(s0.size());
		unit(i) = 1;
		const SolutionPair u(m, s0, unit);
		Complex oracle = 0;
		for (int t = 0; t < m.num_triangles(); ++t)
			if (m.is_metal(t))
				for (std::size_t q = 0; q < rule.points.size(); ++q)
					oracle += rule.weights[q] * 2 * m.geometry(t).area * dot2(K, u.j_at(t, rule.points[q]).value.conjugate());
		CHECK(std::abs(b0(i) - I * c.omega * oracle) < 1e-12 * (1 + std::abs(oracle)));
	}
}

TEST_CASE("incident plane wave")
{
	const Vec2 p(0, 1), d(1, 0);
	const double k = 2.5;
	CHECK((incident_field(p, d, k, Vec2(0, 0)) - p.cast<Complex>()).norm() == 0);
	CHECK((incident_field(p, d, k, Vec2(pi / k, 0)) - CVec2(0, -1)).norm() < 1e-14);
	const double th = pi / 3;
	const PlaneWave w(Vec2(-std::sin(th), std::cos(th)), Vec2(std::cos(th), std::sin(th)), k);
	const auto bow = incident_wave(scenario("bowtie"), 1.0);
	CHECK((bow.direction - w.direction).norm() < 1e-15);
	CHECK((bow.polarization - w.polarization).norm() < 1e-15);
	CHECK(std::abs(bow.polarization.dot(bow.direction)) < 1e-15);

	CHECK_THROWS_AS(PlaneWave(Vec2(0, 1.1), d, k), ContractViolation);
	CHECK_THROWS_AS(PlaneWave(Vec2(std::sqrt(0.5), std::sqrt(0.5)), d, k), ContractViolation);

	// curl of the wave by central differences.
	const Vec2 x(0.3, -0.7);
	const double h = 1e-5;
	const Complex fd = (w(x + Vec2(h, 0))(1) - w(x - Vec2(h, 0))(1) - w(x + Vec2(0, h))(0) + w(x - Vec2(0, h))(0)) / (2 * h);
	CHECK(std::abs(fd - w.curl(x)) < 1e-8);
}

TEST_CASE("energy norm")
{
	const Mesh2D m = ManufacturedProblem::mesh(4);
	const ManufacturedProblem pr(1.5);
	const auto c = pr.coefficients(m);
	const SpacePair s(m, 1);
	const SolutionPair zero(m, s, CVector::Zero(s.size()));
	CHECK(energy_norm(zero, c) == 0);

	// Constant field against the zero pair: omega^2 |c|^2 area with eps* = 1.
	const CVec2 k(Complex(1, 2), -0.5);
	const auto e2 = energy_error_squared(zero, c, [&](const Vec2 &) { return EnergySample{k, 0.0, {}, 0.0}; }, 4);
	double total = 0;
	for (double v : e2)
		total += v;
	CHECK(total == doctest::Approx(1.5 * 1.5 * k.squaredNorm() * 4).epsilon(1e-12));

	// Additivity of the local norms.
	std::mt19937 rng(8);
	const SolutionPair u(m, s, random_vector(s.size(), rng));
	const auto local = energy_norm_squared(u, nullptr, c);
	double sum = 0;
	for (double v : local)
	{
		CHECK(v >= 0);
		sum += v;
	}
	CHECK(std::sqrt(sum) == doctest::Approx(energy_norm(u, c)).epsilon(1e-12));
	const double metal = energy_norm(u, c, [&](int t) { return m.is_metal(t); });
	const double rest = energy_norm(u, c, [&](int t) { return !m.is_metal(t); });
	CHECK(metal * metal + rest * rest == doctest::Approx(sum).epsilon(1e-12));
}

TEST_CASE("parallel assembly is bit-identical")
{
	const auto spec = scenario("vgroove");
	const Mesh2D m = build_domain_mesh(spec.domain(), 2.0);
	const auto prob = make_problem(spec, 0.9);
	const auto c = prob.coefficients(m);
	const SpacePair s(m, 2);
	const auto a1 = assemble(m, c, s, prob.sources, 1), a3 = assemble(m, c, s, prob.sources, 3);
	const Eigen::MatrixXcd d1(a1.matrix), d3(a3.matrix);
	CHECK((d1 - d3).norm() == 0);
	CHECK((a1.rhs - a3.rhs).norm() == 0);
}

TEST_CASE("matrix market export")
{
	const Mesh2D m({Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)}, {{{0, 1, 2}}, {{0, 2, 3}}},
	               {Region::Metal, Region::Metal});
	CoefficientField c;
	c.elements.resize(2);
	for (auto &e : c.elements)
	{
		e.alpha = CMat2::Identity();
		e.zeta = 1.0;
		e.update_stars();
	}
	const SpacePair s(m, 0);
	const CSparse A = assemble_matrix(m, c, s);
	std::ostringstream out;
	write_matrix_market(out, A);
	CHECK(out.str().rfind("%%MatrixMarket matrix coordinate complex general", 0) == 0);
	std::istringstream in(out.str());
	std::string line;
	std::getline(in, line);
	while (in.peek() == '%')
		std::getline(in, line);
	int r = 0, cl = 0, nnz = 0;
	in >> r >> cl >> nnz;
	CHECK(r == A.rows());
	CHECK(nnz == A.nonZeros());
}

TEST_CASE("manufactured solution converges at order p + 1")
{
	for (int p = 0; p <= 2; ++p)
	{
		CAPTURE(p);
		const auto study = manufactured_convergence(p, 2);
		CHECK(study.observed_order >= p + 0.9);
		for (std::size_t i = 1; i < study.error.size(); ++i)
			CHECK(study.error[i] < study.error[i - 1]);
	}
}
