#include <nhd/estimator.hpp>
#include <nhd/parallel.hpp>
#include <nhd/quadrature.hpp>

#include <cmath>
#include <ostream>

namespace nhd
{
	namespace
	{
		// Squared volume and edge norms of the four residuals on one element.
		struct Residuals
		{
			double cc_vol = 0, cc_edge = 0;
			double gd_vol = 0, gd_edge = 0;
			double div_vol = 0, div_edge = 0;
			double curl_vol = 0, curl_edge = 0;
		};

		Complex div_of(const CMat2 &A, const CMat2 &grad)
		{
			// div(A v) for constant A, grad(i, j) = d_j v_i.
			Complex s = 0.0;
			for (int a = 0; a < 2; ++a)
				for (int b = 0; b < 2; ++b)
					s += A(a, b) * grad(b, a);
			return s;
		}

		Complex curl_of(const CMat2 &A, const CMat2 &grad)
		{
			// curl(A v) = d_1 (A v)_2 - d_2 (A v)_1.
			Complex s = 0.0;
			for (int b = 0; b < 2; ++b)
				s += A(1, b) * grad(b, 0) - A(0, b) * grad(b, 1);
			return s;
		}

		Residuals residuals(const SolutionPair &u, const CoefficientField &coeffs, const SourceTerms &src, int t,
		                    int volume_order, int edge_order)
		{
			const Mesh2D &mesh = u.mesh();
			const int p = u.space().degree();
			if (volume_order < 0)
				volume_order = 2 * p + 4;
			if (edge_order < 0)
				edge_order = 2 * p + 4;

			const auto &c = coeffs[t];
			const double omega = coeffs.omega;
			const Complex iw(0, omega);
			const bool metal = mesh.is_metal(t);
			const auto &g = mesh.geometry(t);
			const Vec2 &v0 = mesh.vertex(mesh.triangle(t)[0]);
			const CVector le = u.local_e(t);
			const CVector lj = metal ? u.local_j(t) : CVector();

			Residuals r;
			const auto &rule = triangle_rule(volume_order);
			const auto &tab = reference_tabulation(p, volume_order);
			for (std::size_t q = 0; q < rule.points.size(); ++q)
			{
				const Vec2 x = v0 + g.jacobian * rule.points[q];
				const double w = rule.weights[q] * 2 * g.area;
				const auto phys = RaviartThomasElement::to_physical(tab[q], g);
				const FieldSample E = nd_sample(phys, le);
				FieldSample J;
				if (metal)
					J = rt_sample(phys, lj);

				CVec2 rcc = -omega * omega * (c.eps * E.value) + c.chi * CVec2(E.grad_curl(1), -E.grad_curl(0)) +
				            iw * J.value;
				Complex rdiv = iw * div_of(c.eps, E.grad) + J.div;
				if (src.current)
					rcc -= iw * src.current(x);
				if (src.current_div)
					rdiv -= src.current_div(x);
				r.cc_vol += w * rcc.squaredNorm();
				r.div_vol += w * std::norm(rdiv);

				if (metal)
				{
					CVec2 rgd = -omega * omega * (c.alpha * J.value) - c.zeta * J.grad_div - iw * E.value;
					Complex rcurl = iw * curl_of(c.alpha, J.grad) - E.curl;
					if (src.drive)
						rgd -= iw * src.drive(x);
					if (src.drive_curl)
						rcurl -= src.drive_curl(x);
					r.gd_vol += w * rgd.squaredNorm();
					r.curl_vol += w * std::norm(rcurl);
				}
			}

			const auto &line = line_rule(edge_order);
			const auto &tri = mesh.triangle(t);
			for (int i = 0; i < 3; ++i)
			{
				const Edge &edge = mesh.edge(mesh.triangle_edges(t)[i]);
				if (edge.on_boundary())
					continue;
				const int n = edge.triangles[0] == t ? edge.triangles[1] : edge.triangles[0];
				const auto &cn = coeffs[n];
				const bool both_metal = metal && mesh.is_metal(n);
				const Vec2 &a = mesh.vertex(tri[(i + 1) % 3]);
				const Vec2 &b = mesh.vertex(tri[(i + 2) % 3]);
				const double len = g.edge_lengths[i];
				const Vec2 &nrm = g.normals[i];
				const Vec2 &tan = g.tangents[i];
				for (std::size_t q = 0; q < line.points.size(); ++q)
				{
					const Vec2 x = a + line.points[q] * (b - a);
					const double w = line.weights[q] * len;
					const Vec2 xt = u.to_reference(t, x), xn = u.to_reference(n, x);
					const FieldSample Et = u.e_at(t, xt), En = u.e_at(n, xn);
					r.cc_edge += w * std::norm(c.chi * Et.curl - cn.chi * En.curl);
					r.div_edge += w * std::norm(nrm.cast<Complex>().dot(c.eps * Et.value - cn.eps * En.value));
					if (both_metal)
					{
						const FieldSample Jt = u.j_at(t, xt), Jn = u.j_at(n, xn);
						r.gd_edge += w * std::norm(c.zeta * Jt.div - cn.zeta * Jn.div);
						r.curl_edge += w * std::norm(tan.cast<Complex>().dot(c.alpha * Jt.value - cn.alpha * Jn.value));
					}
				}
			}
			return r;
		}

		ElementEstimate combine(const Residuals &r, const ElementCoefficients &c, double h, double omega, bool metal)
		{
			ElementEstimate e;
			const double sh = std::sqrt(h);
			e.curl_curl = (h * std::sqrt(r.cc_vol) + sh * std::sqrt(r.cc_edge)) / std::sqrt(c.chi_star);
			e.div = (h * std::sqrt(r.div_vol) + omega * sh * std::sqrt(r.div_edge)) / std::sqrt(c.eps_star);
			if (metal)
			{
				e.grad_div = (h * std::sqrt(r.gd_vol) + sh * std::sqrt(r.gd_edge)) / std::sqrt(c.zeta_star);
				e.curl = (h * std::sqrt(r.curl_vol) + omega * sh * std::sqrt(r.curl_edge)) / std::sqrt(c.alpha_star);
			}
			return e;
		}

		// Full vector polynomial space P_k^2 in monomials centred at the
		// barycenter and scaled by h: rows are basis functions.
		struct VectorPolynomials
		{
			int degree;
			Vec2 centre;
			double h;

			int size() const { return (degree + 1) * (degree + 2); }

			// values (size x 2), div (size), curl (size)
			void eval(const Vec2 &x, Eigen::MatrixX2d &v, Eigen::VectorXd &div, Eigen::VectorXd &curl) const
			{
				const double X = (x(0) - centre(0)) / h, Y = (x(1) - centre(1)) / h;
				const int n = size();
				v = Eigen::MatrixX2d::Zero(n, 2);
				div = Eigen::VectorXd::Zero(n);
				curl = Eigen::VectorXd::Zero(n);
				int row = 0;
				for (int s = 0; s <= degree; ++s)
					for (int bexp = 0; bexp <= s; ++bexp)
					{
						const int aexp = s - bexp;
						const double m = std::pow(X, aexp) * std::pow(Y, bexp);
						const double mx = aexp ? aexp * std::pow(X, aexp - 1) * std::pow(Y, bexp) / h : 0.0;
						const double my = bexp ? bexp * std::pow(X, aexp) * std::pow(Y, bexp - 1) / h : 0.0;
						v(row, 0) = m;
						div(row) = mx;
						curl(row) = -my;
						++row;
						v(row, 1) = m;
						div(row) = my;
						curl(row) = mx;
						++row;
					}
			}
		};

		// min over P_k^2 of a |f - v|^2 + b |D(f - v)|^2 on K, D = div or curl.
		template <typename F, typename DF, bool UseDiv>
		double weighted_misfit(const Mesh2D &mesh, int t, int degree, double a, double b, const F &f, const DF &df,
		                       int order)
		{
			const auto &g = mesh.geometry(t);
			const Vec2 &v0 = mesh.vertex(mesh.triangle(t)[0]);
			const auto &rule = triangle_rule(order);
			const VectorPolynomials poly{degree, g.barycenter, g.diameter};
			const int n = poly.size();
			const auto nq = rule.points.size();

			std::vector<Eigen::MatrixX2d> vals(nq);
			std::vector<Eigen::VectorXd> ders(nq);
			std::vector<CVec2> fv(nq);
			std::vector<Complex> dfv(nq);
			Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
			CVector rhs = CVector::Zero(n);
			Eigen::VectorXd div, curl;
			for (std::size_t q = 0; q < nq; ++q)
			{
				const Vec2 x = v0 + g.jacobian * rule.points[q];
				const double w = rule.weights[q] * 2 * g.area;
				poly.eval(x, vals[q], div, curl);
				ders[q] = UseDiv ? div : curl;
				fv[q] = f(x);
				dfv[q] = df(x);
				G += w * (a * vals[q] * vals[q].transpose() + b * ders[q] * ders[q].transpose());
				rhs += w * (a * (vals[q].cast<Complex>() * fv[q]) + b * ders[q].cast<Complex>() * dfv[q]);
			}
			const Eigen::LDLT<Eigen::MatrixXd> ldlt(G);
			if (ldlt.info() != Eigen::Success)
				throw Error("singular local projection on element " + std::to_string(t));
			CVector coef(n);
			coef.real() = ldlt.solve(Eigen::VectorXd(rhs.real()));
			coef.imag() = ldlt.solve(Eigen::VectorXd(rhs.imag()));

			double s = 0;
			for (std::size_t q = 0; q < nq; ++q)
			{
				const double w = rule.weights[q] * 2 * g.area;
				const CVec2 mv = fv[q] - vals[q].transpose().cast<Complex>() * coef;
				const Complex md = dfv[q] - ders[q].cast<Complex>().dot(coef);
				s += w * (a * mv.squaredNorm() + b * std::norm(md));
			}
			return s;
		}
	} // namespace

	std::vector<double> EstimatorBreakdown::eta_k() const
	{
		std::vector<double> v;
		v.reserve(elements.size());
		for (const auto &e : elements)
			v.push_back(e.total());
		return v;
	}

	double root_sum_square(std::span<const double> values)
	{
		double s = 0;
		for (double v : values)
			s += v * v;
		return std::sqrt(s);
	}

	namespace
	{
		template <typename Get>
		double component_total(const std::vector<ElementEstimate> &e, Get get)
		{
			double s = 0;
			for (const auto &x : e)
				s += get(x) * get(x);
			return std::sqrt(s);
		}
	} // namespace

	double EstimatorBreakdown::eta() const
	{
		return component_total(elements, [](const ElementEstimate &e) { return e.total(); });
	}
	double EstimatorBreakdown::eta_curl_curl() const
	{
		return component_total(elements, [](const ElementEstimate &e) { return e.curl_curl; });
	}
	double EstimatorBreakdown::eta_grad_div() const
	{
		return component_total(elements, [](const ElementEstimate &e) { return e.grad_div; });
	}
	double EstimatorBreakdown::eta_div() const
	{
		return component_total(elements, [](const ElementEstimate &e) { return e.div; });
	}
	double EstimatorBreakdown::eta_curl() const
	{
		return component_total(elements, [](const ElementEstimate &e) { return e.curl; });
	}
	double EstimatorBreakdown::oscillation() const { return root_sum_square(osc); }

	ElementEstimate estimate_element(const SolutionPair &u, const CoefficientField &coeffs, const SourceTerms &sources,
	                                 int t, const EstimatorOptions &options)
	{
		const auto r = residuals(u, coeffs, sources, t, options.volume_order, options.edge_order);
		return combine(r, coeffs[t], u.mesh().geometry(t).diameter, coeffs.omega, u.mesh().is_metal(t));
	}

	double eta_curl_curl(const SolutionPair &u, const CoefficientField &c, const SourceTerms &s, int t)
	{
		return estimate_element(u, c, s, t).curl_curl;
	}

	double eta_grad_div(const SolutionPair &u, const CoefficientField &c, const SourceTerms &s, int t)
	{
		if (!u.mesh().is_metal(t))
			throw ContractViolation("grad-div term requested on non-metal element " + std::to_string(t));
		return estimate_element(u, c, s, t).grad_div;
	}

	double eta_div(const SolutionPair &u, const CoefficientField &c, const SourceTerms &s, int t)
	{
		return estimate_element(u, c, s, t).div;
	}

	double eta_curl(const SolutionPair &u, const CoefficientField &c, const SourceTerms &s, int t)
	{
		if (!u.mesh().is_metal(t))
			throw ContractViolation("curl term requested on non-metal element " + std::to_string(t));
		return estimate_element(u, c, s, t).curl;
	}

	double oscillation(const Mesh2D &mesh, const CoefficientField &coeffs, const SourceTerms &sources, int degree,
	                   int t, int order)
	{
		if (order < 0)
			order = 2 * degree + 8;
		const auto &c = coeffs[t];
		const double h = mesh.geometry(t).diameter;
		const auto k = wavenumbers(c, coeffs.omega, coeffs.plasma_frequency, mesh.is_metal(t));
		double s = 0;
		if (sources.current)
		{
			const ScalarSource zero = [](const Vec2 &) { return Complex(0); };
			const auto &df = sources.current_div ? sources.current_div : zero;
			s += weighted_misfit<VectorSource, ScalarSource, true>(mesh, t, degree + 1, k.k_e * k.k_e * h * h, h * h,
			                                                        sources.current, df, order) /
			     c.eps_star;
		}
		if (sources.drive && mesh.is_metal(t))
		{
			const ScalarSource zero = [](const Vec2 &) { return Complex(0); };
			const auto &df = sources.drive_curl ? sources.drive_curl : zero;
			s += weighted_misfit<VectorSource, ScalarSource, false>(mesh, t, degree + 1, k.k_j * k.k_j * h * h, h * h,
			                                                         sources.drive, df, order) /
			     c.alpha_star;
		}
		return std::sqrt(std::max(s, 0.0));
	}

	EstimatorBreakdown estimate(const SolutionPair &u, const CoefficientField &coeffs, const SourceTerms &sources,
	                            const EstimatorOptions &options)
	{
		const Mesh2D &mesh = u.mesh();
		const int nt = mesh.num_triangles();
		EstimatorBreakdown b;
		b.elements.resize(nt);
		b.osc.assign(nt, 0.0);
		parallel_chunks(nt, std::max(1, options.jobs), [&](int begin, int end, int) {
			for (int t = begin; t < end; ++t)
			{
				b.elements[t] = estimate_element(u, coeffs, sources, t, options);
				if (options.oscillation)
					b.osc[t] = oscillation(mesh, coeffs, sources, u.space().degree(), t);
			}
		});
		return b;
	}

	void write_element_csv(std::ostream &out, const Mesh2D &mesh, const EstimatorBreakdown &b,
	                       std::span<const double> xi)
	{
		out << "element,bx,by,region,h,eta_curl_curl,eta_grad_div,eta_div,eta_curl,eta,osc,xi\n";
		out.precision(10);
		for (int t = 0; t < mesh.num_triangles(); ++t)
		{
			const auto &g = mesh.geometry(t);
			const auto &e = b.elements[t];
			out << t << ',' << g.barycenter(0) << ',' << g.barycenter(1) << ',' << to_string(mesh.region(t)) << ','
			    << g.diameter << ',' << e.curl_curl << ',' << e.grad_div << ',' << e.div << ',' << e.curl << ','
			    << e.total() << ',' << b.osc[t] << ',';
			if (!xi.empty())
				out << xi[t];
			out << '\n';
		}
	}
} // namespace nhd
