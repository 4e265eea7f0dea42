#pragma once

#include "assemble.hpp"
#include "solution.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace nhd
{
	/// One element's residual terms. Each term is its weighted volume norm plus
	/// its weighted edge-jump norm; grad_div and curl vanish off the metal.
	struct ElementEstimate
	{
		double curl_curl = 0;
		double grad_div = 0;
		double div = 0;
		double curl = 0;

		double total() const { return curl_curl + grad_div + div + curl; }
	};

	struct EstimatorOptions
	{
		int volume_order = -1; ///< default 2p + 4
		int edge_order = -1;   ///< default 2p + 4
		bool oscillation = true;
		int jobs = 1;
	};

	struct EstimatorBreakdown
	{
		std::vector<ElementEstimate> elements;
		std::vector<double> osc;

		std::vector<double> eta_k() const;
		double eta() const;
		double eta_curl_curl() const;
		double eta_grad_div() const;
		double eta_div() const;
		double eta_curl() const;
		double oscillation() const;
	};

	double root_sum_square(std::span<const double> values);

	ElementEstimate estimate_element(const SolutionPair &u, const CoefficientField &coeffs, const SourceTerms &sources,
	                                 int t, const EstimatorOptions &options = {});

	double eta_curl_curl(const SolutionPair &u, const CoefficientField &c, const SourceTerms &s, int t);
	/// Throws ContractViolation off the metal.
	double eta_grad_div(const SolutionPair &u, const CoefficientField &c, const SourceTerms &s, int t);
	double eta_div(const SolutionPair &u, const CoefficientField &c, const SourceTerms &s, int t);
	/// Throws ContractViolation off the metal.
	double eta_curl(const SolutionPair &u, const CoefficientField &c, const SourceTerms &s, int t);

	/// osc_K for sources projected into P_{p+1}(K)^2 under the weighted
	/// H(div) (current) and H(curl) (drive, metal only) local inner products.
	double oscillation(const Mesh2D &mesh, const CoefficientField &coeffs, const SourceTerms &sources, int degree,
	                   int t, int order = -1);

	EstimatorBreakdown estimate(const SolutionPair &u, const CoefficientField &coeffs, const SourceTerms &sources,
	                            const EstimatorOptions &options = {});

	/// Per-element table: element, bx, by, region, h, eta components, eta, osc, xi.
	/// `xi` may be empty.
	void write_element_csv(std::ostream &out, const Mesh2D &mesh, const EstimatorBreakdown &b,
	                       std::span<const double> xi = {});
} // namespace nhd
