#pragma once

#include "types.hpp"

#include <memory>
#include <vector>

namespace nhd
{
	/// Raised when elimination meets an exactly zero pivot. `dof` is the
	/// original (unpermuted) column index.
	class SingularSystemError : public Error
	{
	public:
		SingularSystemError(const std::string &what, int dof) : Error(what), dof_(dof) {}
		int dof() const { return dof_; }

	private:
		int dof_;
	};

	struct FactorStats
	{
		Eigen::Index size = 0;
		Eigen::Index condensed_size = 0; ///< unknowns left after eliminating local blocks
		Eigen::Index nnz_matrix = 0;
		Eigen::Index nnz_factors = 0; ///< nnz(L) + nnz(U)
		double fill_ratio = 0;        ///< nnz_factors / nnz_matrix
		double pivot_growth = 0;      ///< max |U_ij| / max |A_ij|
	};

	struct SolveReport
	{
		double residual = 0;       ///< ||A x - b|| / ||b|| (0 for b = 0)
		double backward_error = 0; ///< ||A x - b||_inf / (||A||_inf ||x||_inf + ||b||_inf)
		int refinement_steps = 0;
		bool warning = false;      ///< residual above 1e-9 after refinement
	};

	/// Sparse LU with partial pivoting and a column approximate-minimum-degree
	/// ordering. Immutable after construction.
	///
	/// Optional local blocks (element-interior unknowns) are eliminated by dense
	/// LU first and only their Schur complement is factored sparsely. Unknowns of
	/// different blocks must not couple.
	class Factorization
	{
	public:
		explicit Factorization(const CSparse &A, const std::vector<std::vector<int>> &local_blocks = {});

		const FactorStats &stats() const { return stats_; }
		Eigen::Index size() const { return stats_.size; }

		/// Solve with `refinement_steps` sweeps of iterative refinement.
		CVector solve(const CVector &rhs, SolveReport *report = nullptr, int refinement_steps = 1) const;

	private:
		class Solver;
		struct Condensation;
		static std::shared_ptr<const Condensation> condense(const CSparse &A,
		                                                    const std::vector<std::vector<int>> &blocks);
		CVector solve_once(const CVector &rhs) const;

		CSparse matrix_;
		std::shared_ptr<const Solver> lu_;
		std::shared_ptr<const Condensation> cond_; ///< null without local blocks
		FactorStats stats_;
		double norm_inf_ = 0;
	};

	double backward_error(const CSparse &A, const CVector &x, const CVector &b);
} // namespace nhd
