#include <nhd/assemble.hpp>
#include <nhd/parallel.hpp>
#include <nhd/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <ostream>

namespace nhd
{
	namespace
	{
		constexpr int max_rhs_order = 40;

		// Reference Raviart-Thomas values stacked as (quadrature point) x (basis).
		struct ReferenceTables
		{
			Eigen::MatrixXd vx, vy, div;
		};

		const ReferenceTables &reference_tables(int degree, int order)
		{
			static std::map<std::pair<int, int>, std::unique_ptr<ReferenceTables>> cache;
			static std::mutex m;
			const auto &tab = reference_tabulation(degree, order);
			std::lock_guard lock(m);
			auto &slot = cache[{degree, order}];
			if (!slot)
			{
				slot = std::make_unique<ReferenceTables>();
				const auto nq = static_cast<Eigen::Index>(tab.size());
				const auto n = tab.front().value.rows();
				slot->vx.resize(nq, n);
				slot->vy.resize(nq, n);
				slot->div.resize(nq, n);
				for (Eigen::Index q = 0; q < nq; ++q)
				{
					slot->vx.row(q) = tab[q].value.col(0).transpose();
					slot->vy.row(q) = tab[q].value.col(1).transpose();
					slot->div.row(q) = tab[q].div.transpose();
				}
			}
			return *slot;
		}

		// Physical values on one triangle: RT field (px, py) with divergence d;
		// the edge field is (-py, px) with curl d.
		struct PhysicalTables
		{
			Eigen::MatrixXd px, py, d;
		};

		PhysicalTables physical_tables(const ReferenceTables &ref, const TriangleGeometry &g, int t)
		{
			const Mat2 &J = g.jacobian;
			const double det = J.determinant();
			if (!(det > 0) || !std::isfinite(det))
				throw GeometryError("singular Jacobian on element " + std::to_string(t));
			return {(J(0, 0) * ref.vx + J(0, 1) * ref.vy) / det, (J(1, 0) * ref.vx + J(1, 1) * ref.vy) / det,
			        ref.div / det};
		}

		// Global indices and signs of an element's unknowns: E functions, then J
		// functions on the metal. Eliminated functions have index -1.
		void element_dofs(const Mesh2D &mesh, const SpacePair &space, int t, std::vector<int> &dofs,
		                  std::vector<double> &signs)
		{
			const auto e = space.e_dofs(t), j = space.j_dofs(t);
			const auto sg = space.signs(t);
			dofs.assign(e.begin(), e.end());
			signs.assign(sg.begin(), sg.end());
			if (mesh.is_metal(t))
			{
				dofs.insert(dofs.end(), j.begin(), j.end());
				signs.insert(signs.end(), sg.begin(), sg.end());
			}
		}

		// Compressed column pattern holding every pair of unknowns sharing a triangle.
		CSparse element_pattern(const Mesh2D &mesh, const SpacePair &space)
		{
			const int n = space.size();
			std::vector<std::array<int, 2>> owners(n, {-1, -1});
			std::vector<int> dofs;
			std::vector<double> signs;
			for (int t = 0; t < mesh.num_triangles(); ++t)
			{
				element_dofs(mesh, space, t, dofs, signs);
				for (int d : dofs)
					if (d >= 0)
						owners[d][owners[d][0] < 0 ? 0 : 1] = t;
			}
			std::vector<int> outer(n + 1, 0), inner, rows;
			for (int c = 0; c < n; ++c)
			{
				rows.clear();
				for (int t : owners[c])
					if (t >= 0)
					{
						element_dofs(mesh, space, t, dofs, signs);
						for (int d : dofs)
							if (d >= 0)
								rows.push_back(d);
					}
				std::sort(rows.begin(), rows.end());
				rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
				inner.insert(inner.end(), rows.begin(), rows.end());
				outer[c + 1] = static_cast<int>(inner.size());
			}
			CSparse A(n, n);
			A.makeCompressed();
			A.resizeNonZeros(static_cast<Eigen::Index>(inner.size()));
			std::copy(outer.begin(), outer.end(), A.outerIndexPtr());
			std::copy(inner.begin(), inner.end(), A.innerIndexPtr());
			std::fill(A.valuePtr(), A.valuePtr() + inner.size(), Complex(0));
			return A;
		}

		void scatter(CSparse &A, const CMatrix &local, const std::vector<int> &dofs, const std::vector<double> &signs)
		{
			for (Eigen::Index j = 0; j < local.cols(); ++j)
			{
				if (dofs[j] < 0)
					continue;
				const int *first = A.innerIndexPtr() + A.outerIndexPtr()[dofs[j]];
				const int *last = A.innerIndexPtr() + A.outerIndexPtr()[dofs[j] + 1];
				for (Eigen::Index i = 0; i < local.rows(); ++i)
				{
					if (dofs[i] < 0 || local(i, j) == Complex(0))
						continue;
					const auto at = std::lower_bound(first, last, dofs[i]) - A.innerIndexPtr();
					A.valuePtr()[at] += signs[i] * signs[j] * local(i, j);
				}
			}
		}

		// Local right-hand side at one rule order; fills e and (on metal) j.
		void local_rhs(const Mesh2D &mesh, const SpacePair &space, const SourceTerms &src, double omega, int t,
		               int order, CVector &e, CVector &j)
		{
			const auto &rule = triangle_rule(order);
			const auto &g = mesh.geometry(t);
			const Vec2 &v0 = mesh.vertex(mesh.triangle(t)[0]);
			const auto P = physical_tables(reference_tables(space.degree(), order), g, t);
			const double det = 2 * g.area;
			const Complex iw(0, omega);
			const auto n = P.px.cols();
			e = CVector::Zero(n);
			j = CVector::Zero(n);
			const bool metal = mesh.is_metal(t);
			for (std::size_t q = 0; q < rule.points.size(); ++q)
			{
				const Vec2 x = v0 + g.jacobian * rule.points[q];
				const double w = rule.weights[q] * det;
				if (src.current)
				{
					const CVec2 f = iw * w * src.current(x);
					e += f(0) * (-P.py.row(q)).transpose().cast<Complex>() + f(1) * P.px.row(q).transpose().cast<Complex>();
				}
				if (metal && src.drive)
				{
					const CVec2 f = iw * w * src.drive(x);
					j += f(0) * P.px.row(q).transpose().cast<Complex>() + f(1) * P.py.row(q).transpose().cast<Complex>();
				}
			}
		}
	} // namespace

	PlaneWave::PlaneWave(const Vec2 &p, const Vec2 &d, double k) : polarization(p), direction(d), k(k)
	{
		constexpr double tol = 1e-12;
		if (std::abs(p.norm() - 1) > tol || std::abs(d.norm() - 1) > tol)
			throw ContractViolation("plane wave polarization and direction must be unit vectors");
		if (std::abs(p.dot(d)) > tol)
			throw ContractViolation("plane wave polarization must be orthogonal to the direction");
	}

	CVec2 PlaneWave::operator()(const Vec2 &x) const
	{
		return std::exp(Complex(0, -k * direction.dot(x))) * polarization.cast<Complex>();
	}

	Complex PlaneWave::curl(const Vec2 &x) const
	{
		// curl(p e^{-ik d.x}) = -ik (d x p) e^{-ik d.x}
		return Complex(0, -k) * cross2(direction, polarization) * std::exp(Complex(0, -k * direction.dot(x)));
	}

	CVec2 incident_field(const Vec2 &p, const Vec2 &d, double k, const Vec2 &x)
	{
		return PlaneWave(p, d, k)(x);
	}

	SourceTerms scattering_sources(const PlaneWave &wave)
	{
		SourceTerms s;
		s.drive = [wave](const Vec2 &x) { return wave(x); };
		s.drive_curl = [wave](const Vec2 &x) { return wave.curl(x); };
		return s;
	}

	CSparse assemble_matrix(const Mesh2D &mesh, const CoefficientField &coeffs, const SpacePair &space, int jobs)
	{
		const int nt = mesh.num_triangles();
		const int order = 2 * space.degree() + 4;
		const auto &rule = triangle_rule(order);
		const auto &ref = reference_tables(space.degree(), order);
		const Eigen::VectorXd wref = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), rule.weights.size());
		const double omega = coeffs.omega;
		const Complex iw(0, omega);

		jobs = std::max(1, jobs);
		CSparse A = element_pattern(mesh, space);
		// Local matrices are computed in parallel and added in element order, so
		// the sums do not depend on the number of jobs.
		constexpr int batch = 1024;
		std::vector<CMatrix> local(batch);
		std::vector<int> dofs;
		std::vector<double> signs;
		for (int first = 0; first < nt; first += batch)
		{
			const int count = std::min(batch, nt - first);
			parallel_chunks(count, jobs, [&](int begin, int end, int) {
				for (int k = begin; k < end; ++k)
				{
					const int t = first + k;
					const auto &g = mesh.geometry(t);
					const auto P = physical_tables(ref, g, t);
					const Eigen::VectorXd w = wref * (2 * g.area);
					const auto &c = coeffs[t];
					const auto n = P.px.cols();
					const bool metal = mesh.is_metal(t);
					CMatrix &L = local[k];
					L = CMatrix::Zero(metal ? 2 * n : n, metal ? 2 * n : n);

					// Edge field (ex, ey) = (-py, px).
					const Eigen::MatrixXd wx = w.asDiagonal() * P.px, wy = w.asDiagonal() * P.py;
					const Eigen::MatrixXd mxx = P.py.transpose() * wy, myy = P.px.transpose() * wx;
					const Eigen::MatrixXd mxy = -P.py.transpose() * wx;
					const Eigen::MatrixXd stiff = P.d.transpose() * (w.asDiagonal() * P.d);

					L.topLeftCorner(n, n) =
						-omega * omega *
							(c.eps(0, 0) * mxx.cast<Complex>() + c.eps(0, 1) * mxy.cast<Complex>() +
							 c.eps(1, 0) * mxy.transpose().cast<Complex>() + c.eps(1, 1) * myy.cast<Complex>()) +
						c.chi * stiff.cast<Complex>();
					if (!metal)
						continue;
					// RT field mass blocks.
					const Eigen::MatrixXd jxx = P.px.transpose() * wx, jyy = P.py.transpose() * wy;
					const Eigen::MatrixXd jxy = P.px.transpose() * wy;
					L.bottomRightCorner(n, n) =
						-omega * omega *
							(c.alpha(0, 0) * jxx.cast<Complex>() + c.alpha(0, 1) * jxy.cast<Complex>() +
							 c.alpha(1, 0) * jxy.transpose().cast<Complex>() + c.alpha(1, 1) * jyy.cast<Complex>()) +
						c.zeta * stiff.cast<Complex>();
					// mixed(i, j) = (phi_i, psi_j) with phi_i = (-py_i, px_i) and psi_j = (px_j, py_j).
					const Eigen::MatrixXd mixed = -P.py.transpose() * wx + P.px.transpose() * wy;
					L.topRightCorner(n, n) = iw * mixed.cast<Complex>();
					L.bottomLeftCorner(n, n) = -iw * mixed.transpose().cast<Complex>();
				}
			});
			for (int k = 0; k < count; ++k)
			{
				element_dofs(mesh, space, first + k, dofs, signs);
				scatter(A, local[k], dofs, signs);
			}
		}
		A.prune([](Eigen::Index, Eigen::Index, const Complex &v) { return v != Complex(0); });
		return A;
	}

	CVector assemble_rhs(const Mesh2D &mesh, const CoefficientField &coeffs, const SpacePair &space,
	                     const SourceTerms &sources, int jobs)
	{
		CVector b = CVector::Zero(space.size());
		if (sources.empty())
			return b;
		const int nt = mesh.num_triangles();
		jobs = std::max(1, jobs);
		std::vector<CVector> e_parts(nt), j_parts(nt);
		parallel_chunks(nt, jobs, [&](int begin, int end, int) {
			CVector e, j, e2, j2;
			for (int t = begin; t < end; ++t)
			{
				int order = 2 * space.degree() + 4;
				local_rhs(mesh, space, sources, coeffs.omega, t, order, e, j);
				while (order + 4 <= max_rhs_order)
				{
					order += 4;
					local_rhs(mesh, space, sources, coeffs.omega, t, order, e2, j2);
					const double change = std::sqrt((e2 - e).squaredNorm() + (j2 - j).squaredNorm());
					const double scale = std::sqrt(e2.squaredNorm() + j2.squaredNorm());
					e.swap(e2);
					j.swap(j2);
					if (change <= 1e-10 * scale)
						break;
				}
				e_parts[t] = std::move(e);
				j_parts[t] = std::move(j);
			}
		});

		for (int t = 0; t < nt; ++t)
		{
			const auto signs = space.signs(t);
			const auto em = space.e_dofs(t);
			for (std::size_t i = 0; i < em.size(); ++i)
				if (em[i] >= 0)
					b(em[i]) += signs[i] * e_parts[t](i);
			const auto jm = space.j_dofs(t);
			for (std::size_t i = 0; i < jm.size(); ++i)
				if (jm[i] >= 0)
					b(jm[i]) += signs[i] * j_parts[t](i);
		}
		return b;
	}

	DiscreteSystem assemble(const Mesh2D &mesh, const CoefficientField &coeffs, const SpacePair &space,
	                        const SourceTerms &sources, int jobs)
	{
		DiscreteSystem s;
		s.matrix = assemble_matrix(mesh, coeffs, space, jobs);
		s.rhs = assemble_rhs(mesh, coeffs, space, sources, jobs);
		s.num_e = space.num_e();
		s.num_j = space.num_j();
		return s;
	}

	void write_matrix_market(std::ostream &out, const CSparse &A)
	{
		out << "%%MatrixMarket matrix coordinate complex general\n";
		out << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
		out.precision(17);
		for (int k = 0; k < A.outerSize(); ++k)
			for (CSparse::InnerIterator it(A, k); it; ++it)
				out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
	}
} // namespace nhd
