#pragma once

#include "mesh.hpp"

#include <string>
#include <vector>

namespace nhd
{
	/// Drude / hydrodynamic parameters of a metal, in the units of the caller.
	struct DrudeParams
	{
		double plasma_frequency = 0; ///< omega_P
		double damping = 0;          ///< gamma
		double fermi_velocity = 0;   ///< vartheta_F
	};

	DrudeParams gold();   ///< SI units
	DrudeParams silver(); ///< SI units
	DrudeParams metal_by_name(const std::string &name);

	struct VacuumConstants
	{
		double eps0 = 8.8541878128e-12;
		double mu0 = 1.25663706212e-6;

		double light_speed() const;
	};

	/// Units: lengths in `length` metres, frequencies in `frequency` rad/s, eps0 = 1.
	/// With length = 1 nm and frequency = omega_P the assembled entries are O(1)..O(1e3).
	struct UnitSystem
	{
		double length = 1e-9;
		double frequency = 1.0;

		VacuumConstants vacuum() const;
		DrudeParams scale(const DrudeParams &si) const;
	};

	struct NhdCoefficients
	{
		CMat2 alpha;
		Complex zeta;
	};

	/// alpha = (1 - gamma/(i omega)) / (omega_P^2 eps0) I,  zeta = (3/5) vF^2 / (omega_P^2 eps0).
	NhdCoefficients nhd_coefficients(const DrudeParams &params, double omega, const VacuumConstants &vacuum = {});

	/// Complex coordinate-stretching factors d_j = 1 - i s 1{|x_j| > L}.
	Eigen::Vector2cd pml_stretch(const Vec2 &x, double L, double strength = 0.75);

	struct PmlCoefficients
	{
		CMat2 eps;
		Complex chi;
	};

	/// eps~ = diag(d2/d1, d1/d2) eps and chi~ = chi/(d1 d2). eps must be diagonal.
	PmlCoefficients apply_pml(const CMat2 &eps, Complex chi, const Vec2 &x, double L, double strength = 0.75);

	/// max over complex unit u, v of Re(A u . conj v), i.e. the largest singular value.
	template <typename Derived>
	double star_value(const Eigen::MatrixBase<Derived> &A)
	{
		using std::abs;
		using std::sqrt;
		static_assert(Derived::RowsAtCompileTime == 2 && Derived::ColsAtCompileTime == 2);
		// Closed form: sigma_max^2 = (f + sqrt(f^2 - 4 |det A|^2)) / 2 with f = ||A||_F^2.
		const double f = A.squaredNorm();
		const double d = abs(A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0));
		const double disc = std::max(0.0, f * f - 4.0 * d * d);
		return sqrt(0.5 * (f + sqrt(disc)));
	}

	/// Per-element coefficient values and their star weights.
	struct ElementCoefficients
	{
		CMat2 eps = CMat2::Identity();
		Complex chi = 1.0;
		CMat2 alpha = CMat2::Zero();
		Complex zeta = 0.0;

		double eps_star = 1;
		double chi_star = 1;
		double alpha_star = 0;
		double zeta_star = 0;

		void update_stars();
	};

	/// Piecewise-constant coefficients on a mesh at angular frequency omega.
	struct CoefficientField
	{
		double omega = 1;
		double plasma_frequency = 1; ///< used by the plasma wavenumber
		std::vector<ElementCoefficients> elements;

		const ElementCoefficients &operator[](int t) const { return elements[t]; }
	};

	struct PhysicalSetup
	{
		DrudeParams metal;          ///< in the caller's (already scaled) units
		VacuumConstants vacuum;     ///< in the same units
		double omega = 1;           ///< angular frequency in the same units
		double pml_half_width = 6;  ///< L
		double pml_strength = 0.75; ///< 0 disables the absorbing layer
	};

	/// Vacuum eps0 / mu0^-1 everywhere, Drude-NHD alpha and zeta in the metal and
	/// the stretched coefficients in the frame region.
	CoefficientField build_coefficients(const Mesh2D &mesh, const PhysicalSetup &setup);

	struct Wavenumbers
	{
		double k_e = 0, k_j = 0, k_p = 0;
		double c_e = 0, c_j = 0, c_p = 0;
	};

	/// Electromagnetic, current and plasma wavenumbers of one element. k_j, k_p
	/// (and c_j, c_p) are zero outside the metal.
	Wavenumbers wavenumbers(const ElementCoefficients &c, double omega, double plasma_frequency, bool metal);
	std::vector<Wavenumbers> wavenumbers(const Mesh2D &mesh, const CoefficientField &field);
} // namespace nhd
