#pragma once

#include "materials.hpp"
#include "space.hpp"

#include <functional>
#include <vector>

namespace nhd
{
	/// Pointwise values of a discrete vector field and the derivatives the
	/// residuals need. grad(i, j) = d_j value_i.
	struct FieldSample
	{
		CVec2 value = CVec2::Zero();
		CMat2 grad = CMat2::Zero();
		Complex div = 0.0;
		Complex curl = 0.0;
		CVec2 grad_div = CVec2::Zero();  ///< Raviart-Thomas fields
		CVec2 grad_curl = CVec2::Zero(); ///< edge-element fields
	};

	/// Combination of physical Raviart-Thomas basis values with local coefficients.
	FieldSample rt_sample(const BasisValues &phys, const CVector &local);
	/// Same combination seen through the edge-element rotation E = R v.
	FieldSample nd_sample(const BasisValues &phys, const CVector &local);

	/// Coefficient vector of the discrete pair (E_h, J_h) with evaluation
	/// services. Holds references: mesh and space must outlive it.
	class SolutionPair
	{
	public:
		SolutionPair(const Mesh2D &mesh, const SpacePair &space, CVector coefficients);

		const Mesh2D &mesh() const { return *mesh_; }
		const SpacePair &space() const { return *space_; }
		const CVector &coefficients() const { return coefficients_; }

		/// Signed local coefficients (eliminated moments are zero).
		CVector local_e(int t) const;
		CVector local_j(int t) const;

		FieldSample e_at(int t, const Vec2 &xhat) const;
		/// Zero outside the metal.
		FieldSample j_at(int t, const Vec2 &xhat) const;

		/// Reference coordinates of a physical point in triangle t.
		Vec2 to_reference(int t, const Vec2 &x) const;

		/// |Re E_h| style magnitude |E_h| averaged over the triangles around each vertex.
		std::vector<double> vertex_field_magnitude() const;

	private:
		const Mesh2D *mesh_;
		const SpacePair *space_;
		CVector coefficients_;
	};

	/// Pointwise ingredients of the energy norm.
	struct EnergySample
	{
		CVec2 e = CVec2::Zero();
		Complex curl_e = 0.0;
		CVec2 j = CVec2::Zero();
		Complex div_j = 0.0;
	};

	/// omega^2 eps*|e|^2 + chi*|curl e|^2 (+ omega^2 alpha*|j|^2 + zeta*|div j|^2 in the metal).
	double energy_density(const ElementCoefficients &c, double omega, const EnergySample &s, bool metal);

	/// Per-element squared local energy norm of (a - b); b may be null.
	/// Both pairs must live on the same mesh; their degrees may differ.
	std::vector<double> energy_norm_squared(const SolutionPair &a, const SolutionPair *b, const CoefficientField &coeffs,
	                                        int order = -1);

	/// Global (or filtered) energy norm of a discrete pair.
	double energy_norm(const SolutionPair &u, const CoefficientField &coeffs,
	                   const std::function<bool(int)> &element_filter = {});

	/// Per-element squared energy norm of (exact - discrete) for a smooth exact pair.
	std::vector<double> energy_error_squared(const SolutionPair &u, const CoefficientField &coeffs,
	                                         const std::function<EnergySample(const Vec2 &)> &exact, int order);
} // namespace nhd
