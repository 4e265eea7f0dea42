#include <nhd/solution.hpp>

#include <cmath>

namespace nhd
{
	FieldSample rt_sample(const BasisValues &phys, const CVector &local)
	{
		FieldSample s;
		s.value = phys.value.transpose().cast<Complex>() * local;
		const Eigen::Vector4cd g = phys.grad.transpose().cast<Complex>() * local;
		s.grad << g(0), g(1), g(2), g(3);
		s.div = (phys.div.transpose().cast<Complex>() * local)(0);
		s.curl = s.grad(1, 0) - s.grad(0, 1);
		s.grad_div = phys.grad_div.transpose().cast<Complex>() * local;
		return s;
	}

	FieldSample nd_sample(const BasisValues &phys, const CVector &local)
	{
		const FieldSample v = rt_sample(phys, local);
		FieldSample s;
		s.value = CVec2(-v.value(1), v.value(0));
		s.grad.row(0) = -v.grad.row(1);
		s.grad.row(1) = v.grad.row(0);
		s.curl = v.div;
		s.div = -v.curl;
		s.grad_curl = v.grad_div;
		return s;
	}

	SolutionPair::SolutionPair(const Mesh2D &mesh, const SpacePair &space, CVector coefficients)
		: mesh_(&mesh), space_(&space), coefficients_(std::move(coefficients))
	{
		if (coefficients_.size() != space.size())
			throw Error("coefficient vector does not match the discrete space");
	}

	CVector SolutionPair::local_e(int t) const
	{
		const auto map = space_->e_dofs(t);
		const auto signs = space_->signs(t);
		CVector c = CVector::Zero(space_->local_dim());
		for (std::size_t i = 0; i < map.size(); ++i)
			if (map[i] >= 0)
				c(i) = signs[i] * coefficients_(map[i]);
		return c;
	}

	CVector SolutionPair::local_j(int t) const
	{
		const auto map = space_->j_dofs(t);
		const auto signs = space_->signs(t);
		CVector c = CVector::Zero(space_->local_dim());
		for (std::size_t i = 0; i < map.size(); ++i)
			if (map[i] >= 0)
				c(i) = signs[i] * coefficients_(map[i]);
		return c;
	}

	FieldSample SolutionPair::e_at(int t, const Vec2 &xhat) const
	{
		const auto phys = RaviartThomasElement::to_physical(space_->element().tabulate(xhat), mesh_->geometry(t));
		return nd_sample(phys, local_e(t));
	}

	FieldSample SolutionPair::j_at(int t, const Vec2 &xhat) const
	{
		if (!mesh_->is_metal(t))
			return {};
		const auto phys = RaviartThomasElement::to_physical(space_->element().tabulate(xhat), mesh_->geometry(t));
		return rt_sample(phys, local_j(t));
	}

	Vec2 SolutionPair::to_reference(int t, const Vec2 &x) const
	{
		const Vec2 &v0 = mesh_->vertex(mesh_->triangle(t)[0]);
		return mesh_->geometry(t).jacobian.inverse() * (x - v0);
	}

	std::vector<double> SolutionPair::vertex_field_magnitude() const
	{
		std::vector<double> sum(mesh_->num_vertices(), 0.0);
		std::vector<int> count(mesh_->num_vertices(), 0);
		for (int t = 0; t < mesh_->num_triangles(); ++t)
			for (int i = 0; i < 3; ++i)
			{
				const int v = mesh_->triangle(t)[i];
				sum[v] += e_at(t, RaviartThomasElement::reference_vertex(i)).value.norm();
				++count[v];
			}
		for (std::size_t v = 0; v < sum.size(); ++v)
			if (count[v])
				sum[v] /= count[v];
		return sum;
	}

	double energy_density(const ElementCoefficients &c, double omega, const EnergySample &s, bool metal)
	{
		double d = omega * omega * c.eps_star * s.e.squaredNorm() + c.chi_star * std::norm(s.curl_e);
		if (metal)
			d += omega * omega * c.alpha_star * s.j.squaredNorm() + c.zeta_star * std::norm(s.div_j);
		return d;
	}

	std::vector<double> energy_norm_squared(const SolutionPair &a, const SolutionPair *b, const CoefficientField &coeffs,
	                                        int order)
	{
		const Mesh2D &mesh = a.mesh();
		const int pa = a.space().degree();
		const int pb = b ? b->space().degree() : 0;
		if (order < 0)
			order = 2 * std::max(pa, pb) + 4;
		const auto &rule = triangle_rule(order);
		const auto &tab_a = reference_tabulation(pa, order);
		const std::vector<BasisValues> *tab_b = b ? &reference_tabulation(pb, order) : nullptr;

		std::vector<double> out(mesh.num_triangles(), 0.0);
		for (int t = 0; t < mesh.num_triangles(); ++t)
		{
			const auto &g = mesh.geometry(t);
			const double det = 2 * g.area;
			const bool metal = mesh.is_metal(t);
			const CVector ea = a.local_e(t), ja = metal ? a.local_j(t) : CVector();
			CVector eb, jb;
			if (b)
			{
				eb = b->local_e(t);
				if (metal)
					jb = b->local_j(t);
			}
			double s = 0;
			for (std::size_t q = 0; q < rule.points.size(); ++q)
			{
				const auto pha = RaviartThomasElement::to_physical(tab_a[q], g);
				FieldSample E = nd_sample(pha, ea), J;
				if (metal)
					J = rt_sample(pha, ja);
				if (b)
				{
					const auto phb = RaviartThomasElement::to_physical((*tab_b)[q], g);
					const FieldSample Eb = nd_sample(phb, eb);
					E.value -= Eb.value;
					E.curl -= Eb.curl;
					if (metal)
					{
						const FieldSample Jb = rt_sample(phb, jb);
						J.value -= Jb.value;
						J.div -= Jb.div;
					}
				}
				s += rule.weights[q] * det * energy_density(coeffs[t], coeffs.omega, {E.value, E.curl, J.value, J.div}, metal);
			}
			out[t] = s;
		}
		return out;
	}

	double energy_norm(const SolutionPair &u, const CoefficientField &coeffs, const std::function<bool(int)> &element_filter)
	{
		const auto local = energy_norm_squared(u, nullptr, coeffs);
		double s = 0;
		for (std::size_t t = 0; t < local.size(); ++t)
			if (!element_filter || element_filter(static_cast<int>(t)))
				s += local[t];
		return std::sqrt(s);
	}

	std::vector<double> energy_error_squared(const SolutionPair &u, const CoefficientField &coeffs,
	                                         const std::function<EnergySample(const Vec2 &)> &exact, int order)
	{
		const Mesh2D &mesh = u.mesh();
		const int p = u.space().degree();
		const auto &rule = triangle_rule(order);
		const auto &tab = reference_tabulation(p, order);
		std::vector<double> out(mesh.num_triangles(), 0.0);
		for (int t = 0; t < mesh.num_triangles(); ++t)
		{
			const auto &g = mesh.geometry(t);
			const Vec2 &v0 = mesh.vertex(mesh.triangle(t)[0]);
			const bool metal = mesh.is_metal(t);
			const CVector e = u.local_e(t), j = metal ? u.local_j(t) : CVector();
			double s = 0;
			for (std::size_t q = 0; q < rule.points.size(); ++q)
			{
				const auto ph = RaviartThomasElement::to_physical(tab[q], g);
				const FieldSample E = nd_sample(ph, e);
				EnergySample d = exact(Vec2(v0 + g.jacobian * rule.points[q]));
				d.e -= E.value;
				d.curl_e -= E.curl;
				if (metal)
				{
					const FieldSample J = rt_sample(ph, j);
					d.j -= J.value;
					d.div_j -= J.div;
				}
				s += rule.weights[q] * 2 * g.area * energy_density(coeffs[t], coeffs.omega, d, metal);
			}
			out[t] = s;
		}
		return out;
	}
} // namespace nhd
