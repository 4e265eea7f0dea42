#pragma once

#include "estimator.hpp"
#include "refine.hpp"
#include "reference.hpp"

#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace nhd
{
	/// A frequency-domain problem on arbitrary meshes of a fixed domain.
	struct Problem
	{
		std::function<CoefficientField(const Mesh2D &)> coefficients;
		SourceTerms sources;
	};

	struct AdaptConfig
	{
		double theta = 0.05;
		double rho = 0.5;
		int max_level = 0; ///< last iteration index; max_level + 1 solves
		int degree = 1;
		bool literal_sort = false; ///< smallest vertex estimators first
		int reference_every = 1;   ///< 0 disables the reference error
		bool oscillation = false;
		int jobs = 1;

		void validate() const;
	};

	struct IterationRecord
	{
		int iteration = 0;
		int ndofs = 0;
		double eta = 0;
		double xi = std::numeric_limits<double>::quiet_NaN();
		double effectivity = std::numeric_limits<double>::quiet_NaN();
		double osc = 0;
		int triangles = 0;
		int vertices = 0;
		double h_min = 0;
		double h_max = 0;
		double backward_error = 0;
		double reference_backward_error = 0;
		bool converged = false; ///< estimator vanished; no refinement requested
	};

	/// Everything produced at one iteration, handed to an optional observer.
	struct IterationState
	{
		const Mesh2D &mesh;
		const SolutionPair &solution;
		const CoefficientField &coefficients;
		const EstimatorBreakdown &estimate;
		const ErrorReport *error; ///< null when no reference was computed
		const IterationRecord &record;
	};
	using IterationObserver = std::function<void(const IterationState &)>;

	struct SizeSelection
	{
		SizeField sizes;
		std::vector<int> order;    ///< vertices in marking order
		std::vector<int> selected; ///< prefix of `order`
		std::vector<double> vertex_eta;
		bool converged = false;
	};

	/// Vertex estimator eta[a] = sum of incident eta_K, vertex size = max incident
	/// h_K; the shortest prefix of the sorted vertices whose squared sum reaches
	/// theta of the total gets size rho * h. Sort is non-increasing with ties
	/// broken by vertex id (non-decreasing with `literal_sort`).
	SizeSelection generate_mesh_sizes(const Mesh2D &mesh, std::span<const double> eta_k, double theta, double rho,
	                                  bool literal_sort = false);

	std::vector<IterationRecord> adaptive_loop(Mesh2D mesh, const Problem &problem, const AdaptConfig &config,
	                                           const IterationObserver &observer = {});

	/// Solves on mesh, bisect_all(mesh), ... until N_dofs reaches target_dofs
	/// (the first mesh at or above it is included) or max_level + 1 meshes were used.
	std::vector<IterationRecord> uniform_loop(Mesh2D mesh, const Problem &problem, const AdaptConfig &config,
	                                          int target_dofs, const IterationObserver &observer = {});

	/// Columns iter, N_dofs, eta, xi, effectivity [, label].
	void write_convergence_csv(std::ostream &out, std::span<const IterationRecord> records,
	                           const std::string &label = {}, bool header = true);
} // namespace nhd
