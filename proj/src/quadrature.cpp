#include <nhd/quadrature.hpp>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace nhd
{
	LineRule gauss_legendre(int n)
	{
		if (n < 1)
			throw Error("Gauss-Legendre rule needs at least one point");
		LineRule r;
		r.points.resize(n);
		r.weights.resize(n);
		for (int i = 0; i < n; ++i)
		{
			// Newton iteration on P_n starting from the Chebyshev guess.
			double x = std::cos(pi * (i + 0.75) / (n + 0.5));
			double dp = 0;
			for (int it = 0; it < 100; ++it)
			{
				double p0 = 1, p1 = x;
				for (int k = 2; k <= n; ++k)
				{
					const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
					p0 = p1;
					p1 = p2;
				}
				if (n == 1)
				{
					p1 = x;
					p0 = 1;
				}
				dp = n * (x * p1 - p0) / (x * x - 1);
				const double dx = p1 / dp;
				x -= dx;
				if (std::abs(dx) < 1e-16)
					break;
			}
			// Recompute the derivative at the converged root.
			double p0 = 1, p1 = x;
			for (int k = 2; k <= n; ++k)
			{
				const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
				p0 = p1;
				p1 = p2;
			}
			dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1);
			r.points[n - 1 - i] = 0.5 * (x + 1);
			r.weights[n - 1 - i] = 1.0 / ((1 - x * x) * dp * dp);
		}
		return r;
	}

	namespace
	{
		template <typename Rule, typename Make>
		const Rule &cached(std::map<int, std::unique_ptr<Rule>> &cache, std::mutex &m, int order, Make make)
		{
			std::lock_guard lock(m);
			auto &slot = cache[order];
			if (!slot)
				slot = std::make_unique<Rule>(make(order));
			return *slot;
		}
	} // namespace

	const LineRule &line_rule(int order)
	{
		static std::map<int, std::unique_ptr<LineRule>> cache;
		static std::mutex m;
		return cached(cache, m, std::max(order, 0), [](int o) { return gauss_legendre(o / 2 + 1); });
	}

	const TriangleRule &triangle_rule(int order)
	{
		static std::map<int, std::unique_ptr<TriangleRule>> cache;
		static std::mutex m;
		return cached(cache, m, std::max(order, 0), [](int o) {
			// x = u, y = v (1 - u), Jacobian (1 - u): degree o + 1 in u, o in v.
			const int n = (o + 3) / 2;
			const LineRule g = gauss_legendre(n);
			TriangleRule r;
			r.order = o;
			for (int i = 0; i < n; ++i)
				for (int j = 0; j < n; ++j)
				{
					const double u = g.points[i], v = g.points[j];
					r.points.emplace_back(u, v * (1 - u));
					r.weights.push_back(g.weights[i] * g.weights[j] * (1 - u));
				}
			return r;
		});
	}

	double shifted_legendre(int k, double s)
	{
		const double x = 2 * s - 1;
		if (k == 0)
			return 1;
		double p0 = 1, p1 = x;
		for (int n = 2; n <= k; ++n)
		{
			const double p2 = ((2 * n - 1) * x * p1 - (n - 1) * p0) / n;
			p0 = p1;
			p1 = p2;
		}
		return p1;
	}
} // namespace nhd
