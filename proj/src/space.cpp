#include <nhd/space.hpp>

namespace nhd
{
	SpacePair::SpacePair(const Mesh2D &mesh, int degree) : degree_(degree), element_(&raviart_thomas(degree))
	{
		const int nt = mesh.num_triangles();
		const int ne = mesh.num_edges();
		const int nd = local_dim();
		const int ke = element_->edge_dofs();
		const int ki = element_->interior_dofs();

		std::vector<int> e_edge(ne, -1), j_edge(ne, -1);
		for (int e = 0; e < ne; ++e)
			if (!mesh.edge(e).on_boundary())
			{
				e_edge[e] = num_e_;
				num_e_ += ke;
			}
		std::vector<int> e_cell(nt);
		for (int t = 0; t < nt; ++t)
		{
			e_cell[t] = num_e_;
			num_e_ += ki;
		}

		num_j_ = num_e_;
		for (int e = 0; e < ne; ++e)
			if (mesh.metal_interior(e))
			{
				j_edge[e] = num_j_;
				num_j_ += ke;
			}
		std::vector<int> j_cell(nt, -1);
		for (int t = 0; t < nt; ++t)
			if (mesh.is_metal(t))
			{
				j_cell[t] = num_j_;
				num_j_ += ki;
			}
		num_j_ -= num_e_;

		e_map_.assign(static_cast<std::size_t>(nt) * nd, -1);
		signs_.assign(static_cast<std::size_t>(nt) * nd, 1.0);
		j_offset_.assign(nt + 1, 0);
		for (int t = 0; t < nt; ++t)
			j_offset_[t + 1] = j_offset_[t] + (mesh.is_metal(t) ? nd : 0);
		j_map_.assign(j_offset_[nt], -1);

		for (int t = 0; t < nt; ++t)
		{
			const auto &edges = mesh.triangle_edges(t);
			int *em = &e_map_[static_cast<std::size_t>(t) * nd];
			double *sg = &signs_[static_cast<std::size_t>(t) * nd];
			int *jm = mesh.is_metal(t) ? &j_map_[j_offset_[t]] : nullptr;
			for (int i = 0; i < 3; ++i)
			{
				const bool reversed = mesh.edge_reversed(t, i);
				for (int k = 0; k < ke; ++k)
				{
					const int l = element_->edge_dof(i, k);
					// Reversal flips the normal and maps L_k(s) to (-1)^k L_k(s).
					sg[l] = reversed ? ((k % 2 == 0) ? -1.0 : 1.0) : 1.0;
					if (e_edge[edges[i]] >= 0)
						em[l] = e_edge[edges[i]] + k;
					if (jm && j_edge[edges[i]] >= 0)
						jm[l] = j_edge[edges[i]] + k;
				}
			}
			for (int k = 0; k < ki; ++k)
			{
				em[3 * ke + k] = e_cell[t] + k;
				if (jm)
					jm[3 * ke + k] = j_cell[t] + k;
			}
		}
	}

	std::span<const int> SpacePair::e_dofs(int t) const
	{
		return {e_map_.data() + static_cast<std::size_t>(t) * local_dim(), static_cast<std::size_t>(local_dim())};
	}

	std::span<const int> SpacePair::j_dofs(int t) const
	{
		return {j_map_.data() + j_offset_[t], static_cast<std::size_t>(j_offset_[t + 1] - j_offset_[t])};
	}

	std::span<const double> SpacePair::signs(int t) const
	{
		return {signs_.data() + static_cast<std::size_t>(t) * local_dim(), static_cast<std::size_t>(local_dim())};
	}

	CVector interpolate(const Mesh2D &mesh, const SpacePair &space, const std::function<CVec2(const Vec2 &)> &e,
	                    const std::function<CVec2(const Vec2 &)> &j, int order)
	{
		CVector u = CVector::Zero(space.size());
		const auto &el = space.element();
		for (int t = 0; t < mesh.num_triangles(); ++t)
		{
			const auto &g = mesh.geometry(t);
			const Vec2 &v0 = mesh.vertex(mesh.triangle(t)[0]);
			const double det = g.jacobian.determinant();
			const Mat2 Jinv = g.jacobian.inverse();
			const auto signs = space.signs(t);

			// Pull back v = J vhat / det, real and imaginary parts separately.
			auto local = [&](auto &&field_rt) {
				CVector d(el.dim());
				for (int part = 0; part < 2; ++part)
				{
					auto ref = [&](const Vec2 &xh) -> Vec2 {
						const CVec2 v = field_rt(Vec2(v0 + g.jacobian * xh));
						const Vec2 vr = part == 0 ? Vec2(v.real()) : Vec2(v.imag());
						return det * (Jinv * vr);
					};
					const Eigen::VectorXd r = el.reference_dofs(ref, order);
					if (part == 0)
						d.real() = r;
					else
						d.imag() = r;
				}
				return d;
			};

			if (e)
			{
				const CVector d = local([&](const Vec2 &x) {
					const CVec2 E = e(x);
					return CVec2(E(1), -E(0));
				});
				const auto map = space.e_dofs(t);
				for (int i = 0; i < el.dim(); ++i)
					if (map[i] >= 0)
						u(map[i]) = signs[i] * d(i);
			}
			if (j && mesh.is_metal(t))
			{
				const CVector d = local(j);
				const auto map = space.j_dofs(t);
				for (int i = 0; i < el.dim(); ++i)
					if (map[i] >= 0)
						u(map[i]) = signs[i] * d(i);
			}
		}
		return u;
	}
	std::vector<std::vector<int>> element_interior_dofs(const Mesh2D &mesh, const SpacePair &space)
	{
		std::vector<int> touches(space.size(), 0);
		for (int t = 0; t < mesh.num_triangles(); ++t)
		{
			for (int d : space.e_dofs(t))
				if (d >= 0)
					++touches[d];
			for (int d : space.j_dofs(t))
				if (d >= 0)
					++touches[d];
		}
		std::vector<std::vector<int>> blocks(mesh.num_triangles());
		for (int t = 0; t < mesh.num_triangles(); ++t)
		{
			for (int d : space.e_dofs(t))
				if (d >= 0 && touches[d] == 1)
					blocks[t].push_back(d);
			for (int d : space.j_dofs(t))
				if (d >= 0 && touches[d] == 1)
					blocks[t].push_back(d);
		}
		return blocks;
	}
} // namespace nhd
