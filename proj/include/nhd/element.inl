#pragma once

#include "quadrature.hpp"

namespace nhd
{
	template <typename F>
	Eigen::VectorXd RaviartThomasElement::reference_dofs(F &&f, int order) const
	{
		Eigen::VectorXd dofs = Eigen::VectorXd::Zero(dim());
		const LineRule &line = line_rule(order + degree_);
		for (int e = 0; e < 3; ++e)
		{
			const Vec2 &a = reference_vertex((e + 1) % 3);
			const Vec2 &b = reference_vertex((e + 2) % 3);
			const double len = (b - a).norm();
			const Vec2 n((b - a)(1) / len, -(b - a)(0) / len);
			for (std::size_t q = 0; q < line.points.size(); ++q)
			{
				const double s = line.points[q];
				const Vec2 fx = f(Vec2(a + s * (b - a)));
				const double fn = fx.dot(n) * line.weights[q] * len;
				for (int k = 0; k <= degree_; ++k)
					dofs(edge_dof(e, k)) += fn * shifted_legendre(k, s);
			}
		}
		if (degree_ > 0)
		{
			const TriangleRule &tri = triangle_rule(order + degree_);
			for (std::size_t q = 0; q < tri.points.size(); ++q)
			{
				const Vec2 fx = f(tri.points[q]);
				const Eigen::MatrixX2d tests = interior_tests(tri.points[q]);
				dofs.tail(interior_dofs()) += tri.weights[q] * (tests * fx);
			}
		}
		return dofs;
	}
} // namespace nhd
