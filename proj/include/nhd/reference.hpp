#pragma once

#include "assemble.hpp"
#include "solution.hpp"

#include <vector>

namespace nhd
{
	/// Energy-norm distance between a discrete pair and the degree-(p+2)
	/// solution of the same problem on the same mesh.
	struct ErrorReport
	{
		std::vector<double> xi_k;
		double xi = 0;
		int reference_dofs = 0;
		double reference_backward_error = 0;
	};

	inline constexpr int max_reference_degree = 7;

	/// Throws Error when p + 2 exceeds max_reference_degree.
	ErrorReport reference_error(const SolutionPair &u, const CoefficientField &coeffs, const SourceTerms &sources,
	                            int jobs = 1);

	/// Assemble, factor and solve; the pair keeps references to mesh and space.
	struct DiscreteSolve
	{
		CVector coefficients;
		double backward_error = 0;
		double residual = 0;
	};
	DiscreteSolve solve_problem(const Mesh2D &mesh, const SpacePair &space, const CoefficientField &coeffs,
	                            const SourceTerms &sources, int jobs = 1);
} // namespace nhd
