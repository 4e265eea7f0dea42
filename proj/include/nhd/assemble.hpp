#pragma once

#include "materials.hpp"
#include "space.hpp"

#include <functional>
#include <iosfwd>

namespace nhd
{
	using VectorSource = std::function<CVec2(const Vec2 &)>;
	using ScalarSource = std::function<Complex(const Vec2 &)>;

	/// Data of the weak right-hand side i omega (g_E, v) + i omega (g_J, w).
	/// Empty functions stand for zero. The derivative callbacks are only used
	/// by the estimator and the oscillation terms.
	struct SourceTerms
	{
		VectorSource current;     ///< g_E on the whole domain
		ScalarSource current_div; ///< div g_E
		VectorSource drive;       ///< g_J on the metal
		ScalarSource drive_curl;  ///< curl g_J

		bool empty() const { return !current && !drive; }
	};

	/// Plane wave p exp(-i k d.x). p and d must be orthonormal.
	struct PlaneWave
	{
		Vec2 polarization;
		Vec2 direction;
		double k = 0;

		PlaneWave(const Vec2 &p, const Vec2 &d, double k);

		CVec2 operator()(const Vec2 &x) const;
		Complex curl(const Vec2 &x) const;
	};

	CVec2 incident_field(const Vec2 &p, const Vec2 &d, double k, const Vec2 &x);

	/// g_E = 0, g_J = plane wave: the scattering right-hand side.
	SourceTerms scattering_sources(const PlaneWave &wave);

	struct DiscreteSystem
	{
		CSparse matrix;
		CVector rhs;
		int num_e = 0;
		int num_j = 0;
	};

	/// A(i, j) = b(phi_j, phi_i). Rows and columns: E-dofs, then J-dofs.
	CSparse assemble_matrix(const Mesh2D &mesh, const CoefficientField &coeffs, const SpacePair &space, int jobs = 1);

	/// Entries i omega (g_E, phi_i) and i omega (g_J, psi_i). The element rule is
	/// raised until the local vector changes by at most 1e-10 relative.
	CVector assemble_rhs(const Mesh2D &mesh, const CoefficientField &coeffs, const SpacePair &space,
	                     const SourceTerms &sources, int jobs = 1);

	DiscreteSystem assemble(const Mesh2D &mesh, const CoefficientField &coeffs, const SpacePair &space,
	                        const SourceTerms &sources, int jobs = 1);

	/// Matrix Market coordinate complex general.
	void write_matrix_market(std::ostream &out, const CSparse &A);
} // namespace nhd
