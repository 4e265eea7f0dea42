#include <nhd/manufactured.hpp>
#include <nhd/meshgen.hpp>
#include <nhd/refine.hpp>
#include <nhd/solver.hpp>

#include <cmath>

namespace nhd
{
	namespace
	{
		// cos(a x + b) with its first two derivatives.
		struct Cosine
		{
			double a, b;
			double f(double x) const { return std::cos(a * x + b); }
			double d1(double x) const { return -a * std::sin(a * x + b); }
			double d2(double x) const { return -a * a * std::cos(a * x + b); }
		};

		// E = (A(x) C(y), B(x) D(y)), J = s (P(x) Q(y), R(x) S(y)).
		const Cosine A{0.7, 0.3}, C{pi / 2, 0}, B{pi / 2, 0}, D{0.9, -0.4};
		const Cosine P{pi, 0}, Q{1.3, 0.2}, R{0.8, -0.5}, S{pi, 0};

		bool in_metal(const Vec2 &x) { return x.cwiseAbs().maxCoeff() < 0.5; }
	} // namespace

	ManufacturedProblem::ManufacturedProblem(double omega)
		: omega_(omega), eps_(1.0), chi_(1.0), alpha_(0.8, 0.2), zeta_(0.5), j_scale_(1.0, 0.5)
	{
		const Complex iw(0, omega_);
		const double w2 = omega_ * omega_;
		const ManufacturedProblem self = *this;
		sources_.current = [self, iw, w2](const Vec2 &x) {
			const double X = x(0), Y = x(1);
			const CVec2 cc(B.d1(X) * D.d1(Y) - A.f(X) * C.d2(Y), -(B.d2(X) * D.f(Y) - A.d1(X) * C.d1(Y)));
			return CVec2((-w2 * self.eps_ * self.e(x) + self.chi_ * cc + iw * self.j(x)) / iw);
		};
		sources_.current_div = [self, iw, w2](const Vec2 &x) {
			const double X = x(0), Y = x(1);
			const double div_e = A.d1(X) * C.f(Y) + B.f(X) * D.d1(Y);
			Complex div_j = 0.0;
			if (in_metal(x))
				div_j = self.j_scale_ * (P.d1(X) * Q.f(Y) + R.f(X) * S.d1(Y));
			return (-w2 * self.eps_ * div_e + iw * div_j) / iw;
		};
		sources_.drive = [self, iw, w2](const Vec2 &x) {
			const double X = x(0), Y = x(1);
			const CVec2 grad_div =
				self.j_scale_ * CVec2(P.d2(X) * Q.f(Y) + R.d1(X) * S.d1(Y), P.d1(X) * Q.d1(Y) + R.f(X) * S.d2(Y));
			return CVec2((-w2 * self.alpha_ * self.j(x) - self.zeta_ * grad_div - iw * self.e(x)) / iw);
		};
		sources_.drive_curl = [self, iw, w2](const Vec2 &x) {
			const double X = x(0), Y = x(1);
			const Complex curl_j = self.j_scale_ * (R.d1(X) * S.f(Y) - P.f(X) * Q.d1(Y));
			const double curl_e = B.d1(X) * D.f(Y) - A.f(X) * C.d1(Y);
			return (-w2 * self.alpha_ * curl_j - iw * curl_e) / iw;
		};
	}

	CoefficientField ManufacturedProblem::coefficients(const Mesh2D &mesh) const
	{
		CoefficientField field;
		field.omega = omega_;
		field.plasma_frequency = 1.0;
		field.elements.resize(mesh.num_triangles());
		for (int t = 0; t < mesh.num_triangles(); ++t)
		{
			auto &c = field.elements[t];
			c.eps = eps_ * CMat2::Identity();
			c.chi = chi_;
			if (mesh.is_metal(t))
			{
				c.alpha = alpha_ * CMat2::Identity();
				c.zeta = zeta_;
			}
			c.update_stars();
		}
		return field;
	}

	CVec2 ManufacturedProblem::e(const Vec2 &x) const
	{
		return CVec2(A.f(x(0)) * C.f(x(1)), B.f(x(0)) * D.f(x(1)));
	}

	CVec2 ManufacturedProblem::j(const Vec2 &x) const
	{
		if (!in_metal(x))
			return CVec2::Zero();
		return j_scale_ * CVec2(P.f(x(0)) * Q.f(x(1)), R.f(x(0)) * S.f(x(1)));
	}

	EnergySample ManufacturedProblem::exact(const Vec2 &x) const
	{
		const double X = x(0), Y = x(1);
		EnergySample s;
		s.e = e(x);
		s.curl_e = B.d1(X) * D.f(Y) - A.f(X) * C.d1(Y);
		if (in_metal(x))
		{
			s.j = j(x);
			s.div_j = j_scale_ * (P.d1(X) * Q.f(Y) + R.f(X) * S.d1(Y));
		}
		return s;
	}

	Mesh2D ManufacturedProblem::mesh(int n) { return square_mesh(n, 1.0, 0.5); }

	double fitted_slope(const std::vector<double> &x, const std::vector<double> &y)
	{
		const auto n = static_cast<Eigen::Index>(x.size());
		if (n < 2 || y.size() != x.size())
			throw Error("slope fit needs at least two paired samples");
		Eigen::MatrixXd M(n, 2);
		Eigen::VectorXd r(n);
		for (Eigen::Index i = 0; i < n; ++i)
		{
			M(i, 0) = std::log(x[i]);
			M(i, 1) = 1.0;
			r(i) = std::log(y[i]);
		}
		return M.colPivHouseholderQr().solve(r)(0);
	}

	ConvergenceStudy manufactured_convergence(int degree, int levels, int jobs)
	{
		const ManufacturedProblem problem;
		ConvergenceStudy study;
		Mesh2D mesh = ManufacturedProblem::mesh();
		for (int level = 0; level <= levels; ++level)
		{
			if (level > 0)
				mesh = bisect_all(bisect_all(mesh));
			const SpacePair space(mesh, degree);
			const auto coeffs = problem.coefficients(mesh);
			const auto system = assemble(mesh, coeffs, space, problem.sources(), jobs);
			const Factorization lu(system.matrix);
			const SolutionPair u(mesh, space, lu.solve(system.rhs));
			const auto err = energy_error_squared(u, coeffs, [&](const Vec2 &x) { return problem.exact(x); },
			                                      2 * degree + 6);
			double e2 = 0;
			for (double v : err)
				e2 += v;
			study.h.push_back(mesh.max_diameter());
			study.ndofs.push_back(space.size());
			study.error.push_back(std::sqrt(e2));
		}
		study.observed_order = fitted_slope(study.h, study.error);
		return study;
	}
} // namespace nhd
