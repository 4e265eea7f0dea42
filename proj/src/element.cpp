#include <nhd/element.hpp>

#include <array>
#include <map>
#include <memory>
#include <mutex>

namespace nhd
{
	namespace
	{
		constexpr double centre = 1.0 / 3.0;

		double ipow(double x, int n)
		{
			double r = 1;
			for (int i = 0; i < n; ++i)
				r *= x;
			return r;
		}
	} // namespace

	const Vec2 &RaviartThomasElement::reference_vertex(int i)
	{
		static const std::array<Vec2, 3> v{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
		return v[i];
	}

	RaviartThomasElement::RaviartThomasElement(int degree) : degree_(degree)
	{
		if (degree < 0 || degree > 7)
			throw Error("Raviart-Thomas degree must lie in [0, 7]");

		const int p = degree;
		for (int s = 0; s <= p + 1; ++s)
			for (int b = 0; b <= s; ++b)
				exponents_.push_back({s - b, b});
		nmono_ = static_cast<int>(exponents_.size());
		auto mono_index = [&](int a, int b) {
			const int s = a + b;
			return s * (s + 1) / 2 + b;
		};

		// Spanning set P_p^2 + x P~_p in centred monomials.
		const int n = dim();
		Eigen::MatrixXd sx = Eigen::MatrixXd::Zero(n, nmono_), sy = Eigen::MatrixXd::Zero(n, nmono_);
		int row = 0;
		for (int s = 0; s <= p; ++s)
			for (int b = 0; b <= s; ++b)
			{
				sx(row++, mono_index(s - b, b)) = 1;
				sy(row++, mono_index(s - b, b)) = 1;
			}
		for (int b = 0; b <= p; ++b)
		{
			sx(row, mono_index(p - b + 1, b)) = 1;
			sy(row, mono_index(p - b, b + 1)) = 1;
			++row;
		}

		// D(k, j) = dof_k(span_j)
		Eigen::MatrixXd m(nmono_, 6);
		Eigen::MatrixXd dofs(n, n);
		for (int j = 0; j < n; ++j)
		{
			auto span = [&](const Vec2 &x) {
				monomials(x, m);
				return Vec2(sx.row(j).dot(m.col(0)), sy.row(j).dot(m.col(0)));
			};
			dofs.col(j) = reference_dofs(span, 2 * p + 2);
		}

		const Eigen::MatrixXd basis = dofs.transpose().fullPivLu().inverse();
		cx_ = basis * sx;
		cy_ = basis * sy;
	}

	void RaviartThomasElement::monomials(const Vec2 &xhat, Eigen::MatrixXd &m) const
	{
		m.resize(nmono_, 6);
		const double X = xhat(0) - centre, Y = xhat(1) - centre;
		for (int i = 0; i < nmono_; ++i)
		{
			const int a = exponents_[i][0], b = exponents_[i][1];
			const double xa = ipow(X, a), yb = ipow(Y, b);
			const double xa1 = a >= 1 ? a * ipow(X, a - 1) : 0.0;
			const double yb1 = b >= 1 ? b * ipow(Y, b - 1) : 0.0;
			const double xa2 = a >= 2 ? a * (a - 1) * ipow(X, a - 2) : 0.0;
			const double yb2 = b >= 2 ? b * (b - 1) * ipow(Y, b - 2) : 0.0;
			m(i, 0) = xa * yb;
			m(i, 1) = xa1 * yb;
			m(i, 2) = xa * yb1;
			m(i, 3) = xa2 * yb;
			m(i, 4) = xa1 * yb1;
			m(i, 5) = xa * yb2;
		}
	}

	BasisValues RaviartThomasElement::tabulate(const Vec2 &xhat) const
	{
		Eigen::MatrixXd m;
		monomials(xhat, m);
		BasisValues r;
		r.value.resize(dim(), 2);
		r.grad.resize(dim(), 4);
		r.grad_div.resize(dim(), 2);
		r.value.col(0) = cx_ * m.col(0);
		r.value.col(1) = cy_ * m.col(0);
		r.grad.col(0) = cx_ * m.col(1);
		r.grad.col(1) = cx_ * m.col(2);
		r.grad.col(2) = cy_ * m.col(1);
		r.grad.col(3) = cy_ * m.col(2);
		r.div = r.grad.col(0) + r.grad.col(3);
		r.grad_div.col(0) = cx_ * m.col(3) + cy_ * m.col(4);
		r.grad_div.col(1) = cx_ * m.col(4) + cy_ * m.col(5);
		return r;
	}

	BasisValues RaviartThomasElement::to_physical(const BasisValues &ref, const TriangleGeometry &g)
	{
		const Mat2 &J = g.jacobian;
		const double det = J.determinant();
		const Mat2 Jinv = J.inverse();
		BasisValues r;
		const auto n = ref.value.rows();
		r.value = ref.value * J.transpose() / det;
		r.div = ref.div / det;
		r.grad_div = ref.grad_div * Jinv / det;
		r.grad.resize(n, 4);
		for (Eigen::Index i = 0; i < n; ++i)
		{
			Mat2 gr;
			gr << ref.grad(i, 0), ref.grad(i, 1), ref.grad(i, 2), ref.grad(i, 3);
			const Mat2 gp = J * gr * Jinv / det;
			r.grad.row(i) << gp(0, 0), gp(0, 1), gp(1, 0), gp(1, 1);
		}
		return r;
	}

	Eigen::MatrixX2d RaviartThomasElement::interior_tests(const Vec2 &xhat) const
	{
		Eigen::MatrixX2d t = Eigen::MatrixX2d::Zero(interior_dofs(), 2);
		const double X = xhat(0) - centre, Y = xhat(1) - centre;
		int row = 0;
		for (int s = 0; s <= degree_ - 1; ++s)
			for (int b = 0; b <= s; ++b)
			{
				const double v = ipow(X, s - b) * ipow(Y, b);
				t(row++, 0) = v;
				t(row++, 1) = v;
			}
		return t;
	}

	const RaviartThomasElement &raviart_thomas(int degree)
	{
		static std::array<std::unique_ptr<RaviartThomasElement>, 8> cache;
		static std::mutex m;
		if (degree < 0 || degree > 7)
			throw Error("Raviart-Thomas degree must lie in [0, 7]");
		std::lock_guard lock(m);
		if (!cache[degree])
			cache[degree] = std::make_unique<RaviartThomasElement>(degree);
		return *cache[degree];
	}

	const std::vector<BasisValues> &reference_tabulation(int degree, int order)
	{
		static std::map<std::pair<int, int>, std::unique_ptr<std::vector<BasisValues>>> cache;
		static std::mutex m;
		const auto &el = raviart_thomas(degree);
		const auto &rule = triangle_rule(order);
		std::lock_guard lock(m);
		auto &slot = cache[{degree, order}];
		if (!slot)
		{
			slot = std::make_unique<std::vector<BasisValues>>();
			for (const auto &x : rule.points)
				slot->push_back(el.tabulate(x));
		}
		return *slot;
	}
} // namespace nhd
