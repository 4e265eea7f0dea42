#include <nhd/adapt.hpp>
#include <nhd/solver.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace nhd
{
	void AdaptConfig::validate() const
	{
		if (!(theta > 0 && theta < 1))
			throw ContractViolation("theta must lie in (0, 1)");
		if (!(rho > 0 && rho < 1))
			throw ContractViolation("rho must lie in (0, 1)");
		if (max_level < 0)
			throw ContractViolation("iteration count must be non-negative");
		if (degree < 0 || degree + (reference_every > 0 ? 2 : 0) > max_reference_degree)
			throw ContractViolation("polynomial degree out of range");
	}

	SizeSelection generate_mesh_sizes(const Mesh2D &mesh, std::span<const double> eta_k, double theta, double rho,
	                                  bool literal_sort)
	{
		if (static_cast<int>(eta_k.size()) != mesh.num_triangles())
			throw ContractViolation("estimator does not cover the mesh");
		const int nv = mesh.num_vertices();
		SizeSelection s;
		s.vertex_eta.assign(nv, 0.0);
		s.sizes.sizes.assign(nv, 0.0);
		for (int t = 0; t < mesh.num_triangles(); ++t)
			for (int v : mesh.triangle(t))
			{
				s.vertex_eta[v] += eta_k[t];
				s.sizes.sizes[v] = std::max(s.sizes.sizes[v], mesh.geometry(t).diameter);
			}

		double total = 0;
		for (double e : s.vertex_eta)
			total += e * e;
		s.order.resize(nv);
		std::iota(s.order.begin(), s.order.end(), 0);
		const auto &eta = s.vertex_eta;
		if (literal_sort)
			std::stable_sort(s.order.begin(), s.order.end(), [&](int a, int b) { return eta[a] < eta[b]; });
		else
			std::stable_sort(s.order.begin(), s.order.end(), [&](int a, int b) { return eta[a] > eta[b]; });

		if (!(total > 0))
		{
			s.converged = true;
			return s;
		}
		double acc = 0;
		for (int v : s.order)
		{
			acc += eta[v] * eta[v];
			s.selected.push_back(v);
			s.sizes.sizes[v] *= rho;
			if (acc >= theta * total)
				break;
		}
		return s;
	}

	namespace
	{
		IterationRecord solve_and_measure(const Mesh2D &mesh, const Problem &problem, const AdaptConfig &config,
		                                  int iteration, bool with_reference, EstimatorBreakdown &estimate,
		                                  const IterationObserver &observer)
		{
			const SpacePair space(mesh, config.degree);
			const auto coeffs = problem.coefficients(mesh);
			const auto solved = solve_problem(mesh, space, coeffs, problem.sources, config.jobs);
			const SolutionPair u(mesh, space, solved.coefficients);

			EstimatorOptions eo;
			eo.oscillation = config.oscillation;
			eo.jobs = config.jobs;
			estimate = nhd::estimate(u, coeffs, problem.sources, eo);

			IterationRecord r;
			r.iteration = iteration;
			r.ndofs = space.size();
			r.eta = estimate.eta();
			r.osc = estimate.oscillation();
			r.triangles = mesh.num_triangles();
			r.vertices = mesh.num_vertices();
			r.h_max = mesh.max_diameter();
			r.h_min = r.h_max;
			for (int t = 0; t < mesh.num_triangles(); ++t)
				r.h_min = std::min(r.h_min, mesh.geometry(t).diameter);
			r.backward_error = solved.backward_error;

			ErrorReport err;
			if (with_reference)
			{
				err = reference_error(u, coeffs, problem.sources, config.jobs);
				r.xi = err.xi;
				r.effectivity = err.xi > 0 ? r.eta / err.xi : std::numeric_limits<double>::quiet_NaN();
				r.reference_backward_error = err.reference_backward_error;
			}
			if (observer)
				observer({mesh, u, coeffs, estimate, with_reference ? &err : nullptr, r});
			return r;
		}

		bool reference_due(const AdaptConfig &c, int iteration, bool last)
		{
			return c.reference_every > 0 && (iteration % c.reference_every == 0 || last);
		}
	} // namespace

	std::vector<IterationRecord> adaptive_loop(Mesh2D mesh, const Problem &problem, const AdaptConfig &config,
	                                           const IterationObserver &observer)
	{
		config.validate();
		std::vector<IterationRecord> records;
		for (int level = 0; level <= config.max_level; ++level)
		{
			try
			{
				EstimatorBreakdown estimate;
				const bool last = level == config.max_level;
				auto r = solve_and_measure(mesh, problem, config, level, reference_due(config, level, last), estimate,
				                           observer);
				if (!last)
				{
					const auto sel = generate_mesh_sizes(mesh, estimate.eta_k(), config.theta, config.rho,
					                                     config.literal_sort);
					r.converged = sel.converged;
					records.push_back(r);
					if (sel.converged)
						break;
					mesh = refine(mesh, sel.sizes);
				}
				else
					records.push_back(r);
			}
			catch (const SingularSystemError &e)
			{
				throw SingularSystemError("adaptive iteration " + std::to_string(level) + ": " + e.what(), e.dof());
			}
			catch (const Error &e)
			{
				throw Error("adaptive iteration " + std::to_string(level) + ": " + e.what());
			}
		}
		return records;
	}

	std::vector<IterationRecord> uniform_loop(Mesh2D mesh, const Problem &problem, const AdaptConfig &config,
	                                          int target_dofs, const IterationObserver &observer)
	{
		config.validate();
		std::vector<IterationRecord> records;
		for (int level = 0; level <= config.max_level; ++level)
		{
			const int ndofs = SpacePair(mesh, config.degree).size();
			const bool last = level == config.max_level || ndofs >= target_dofs;
			EstimatorBreakdown estimate;
			try
			{
				records.push_back(
					solve_and_measure(mesh, problem, config, level, reference_due(config, level, last), estimate, observer));
			}
			catch (const Error &e)
			{
				throw Error("uniform iteration " + std::to_string(level) + ": " + e.what());
			}
			if (last)
				break;
			mesh = bisect_all(mesh);
		}
		return records;
	}

	void write_convergence_csv(std::ostream &out, std::span<const IterationRecord> records, const std::string &label,
	                           bool header)
	{
		if (header)
			out << "iter,N_dofs,eta,xi,effectivity" << (label.empty() ? "" : ",label") << '\n';
		out.precision(10);
		for (const auto &r : records)
		{
			out << r.iteration << ',' << r.ndofs << ',' << r.eta << ',';
			if (!std::isnan(r.xi))
				out << r.xi;
			out << ',';
			if (!std::isnan(r.effectivity))
				out << r.effectivity;
			if (!label.empty())
				out << ',' << label;
			out << '\n';
		}
	}
} // namespace nhd
