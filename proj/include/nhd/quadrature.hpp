#pragma once

#include "types.hpp"

#include <vector>

namespace nhd
{
	/// Gauss-Legendre rule on [0, 1].
	struct LineRule
	{
		std::vector<double> points;
		std::vector<double> weights;
	};

	/// Rule on the unit triangle (0,0), (1,0), (0,1); weights sum to 1/2.
	struct TriangleRule
	{
		std::vector<Vec2> points;
		std::vector<double> weights;
		int order = 0;
	};

	LineRule gauss_legendre(int npoints);

	/// Exact for polynomials of total degree <= order.
	const LineRule &line_rule(int order);

	/// Collapsed (Duffy) Gauss rule, exact for polynomials of total degree <= order.
	const TriangleRule &triangle_rule(int order);

	/// Shifted Legendre polynomial P_k(2s - 1) on [0, 1].
	double shifted_legendre(int k, double s);
} // namespace nhd
