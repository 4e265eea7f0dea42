#pragma once

#include "assemble.hpp"
#include "solution.hpp"

#include <vector>

namespace nhd
{
	/// Smooth (E, J) on (-1, 1)^2 with metal (-1/2, 1/2)^2: E x n = 0 on the
	/// outer boundary, J . n = 0 on the metal boundary, and sources obtained by
	/// applying the strong operators. Coefficients are isotropic and constant
	/// per region.
	class ManufacturedProblem
	{
	public:
		explicit ManufacturedProblem(double omega = 1.0);

		double omega() const { return omega_; }
		CoefficientField coefficients(const Mesh2D &mesh) const;
		const SourceTerms &sources() const { return sources_; }

		CVec2 e(const Vec2 &x) const;
		CVec2 j(const Vec2 &x) const; ///< zero outside the metal
		EnergySample exact(const Vec2 &x) const;

		/// Coarsest mesh; n cells per direction (multiple of 4).
		static Mesh2D mesh(int n = 4);

	private:
		double omega_;
		Complex eps_, chi_, alpha_, zeta_;
		Complex j_scale_;
		SourceTerms sources_;
	};

	struct ConvergenceStudy
	{
		std::vector<double> h;
		std::vector<int> ndofs;
		std::vector<double> error;
		double observed_order = 0; ///< least-squares slope of log error vs log h
	};

	/// Least-squares slope of log y against log x.
	double fitted_slope(const std::vector<double> &x, const std::vector<double> &y);

	/// Energy-norm error of the discrete solution on the coarse mesh and after
	/// each of `levels` uniform refinements (h halved per level).
	ConvergenceStudy manufactured_convergence(int degree, int levels, int jobs = 1);
} // namespace nhd
