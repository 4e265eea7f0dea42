#pragma once

#include "mesh.hpp"

#include <vector>

namespace nhd
{
	/// Raviart-Thomas basis quantities at one point (reference or physical).
	/// Rows index basis functions.
	struct BasisValues
	{
		Eigen::MatrixX2d value;
		Eigen::MatrixX4d grad; ///< columns d1 v1, d2 v1, d1 v2, d2 v2
		Eigen::VectorXd div;
		Eigen::MatrixX2d grad_div;
	};

	/// Degree-p Raviart-Thomas element on the unit triangle, dual to
	///  - normal moments against shifted Legendre polynomials L_0..L_p on each
	///    edge (edge i opposite vertex i, traversed counter-clockwise);
	///  - moments against (x - 1/3)^a (y - 1/3)^b e_c, a + b <= p - 1.
	///
	/// The first-kind edge element of the same degree is the 90 degree rotation of
	/// this element: tangential moments become normal moments.
	class RaviartThomasElement
	{
	public:
		explicit RaviartThomasElement(int degree);

		int degree() const { return degree_; }
		int dim() const { return (degree_ + 1) * (degree_ + 3); }
		int edge_dofs() const { return degree_ + 1; }
		int interior_dofs() const { return degree_ * (degree_ + 1); }

		/// Local index of the k-th moment on edge i.
		int edge_dof(int edge, int k) const { return edge * (degree_ + 1) + k; }

		BasisValues tabulate(const Vec2 &xhat) const;

		/// Contravariant Piola transform of reference values to the triangle.
		static BasisValues to_physical(const BasisValues &ref, const TriangleGeometry &g);

		/// Local degrees of freedom of a reference field given as a callback
		/// xhat -> value (2-vector); quadrature exact to `order` on the interior.
		template <typename F>
		Eigen::VectorXd reference_dofs(F &&f, int order) const;

		/// Reference interior moment test functions, evaluated at xhat.
		Eigen::MatrixX2d interior_tests(const Vec2 &xhat) const;

		static const Vec2 &reference_vertex(int i);

	private:
		int degree_;
		int nmono_;
		Eigen::MatrixXd cx_, cy_; // dim x nmono coefficients of the two components
		std::vector<std::array<int, 2>> exponents_;

		void monomials(const Vec2 &xhat, Eigen::MatrixXd &m) const; // nmono x 6: f, fx, fy, fxx, fxy, fyy
	};

	/// Shared, lazily built elements for degrees 0..7.
	const RaviartThomasElement &raviart_thomas(int degree);

	/// Cached reference tabulation of raviart_thomas(degree) at the points of
	/// triangle_rule(order).
	const std::vector<BasisValues> &reference_tabulation(int degree, int order);
} // namespace nhd

#include "element.inl"
