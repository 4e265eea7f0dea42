#include <nhd/solver.hpp>

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>

namespace nhd
{
	// Exposes the stored factors for the growth diagnostic.
	class Factorization::Solver : public Eigen::SparseLU<CSparse, Eigen::COLAMDOrdering<int>>
	{
	public:
		double max_factor_entry() const
		{
			double m = 0;
			for (Eigen::Index i = 0; i < m_Lstore.colIndexPtr()[m_Lstore.cols()]; ++i)
				m = std::max(m, std::abs(m_Lstore.valuePtr()[i]));
			for (Eigen::Index i = 0; i < m_Ustore.nonZeros(); ++i)
				m = std::max(m, std::abs(m_Ustore.valuePtr()[i]));
			return m;
		}

		Eigen::Index stored_entries() const { return nnzL() + nnzU(); }
	};

	namespace
	{
		double norm_inf(const CSparse &A)
		{
			Eigen::VectorXd rows = Eigen::VectorXd::Zero(A.rows());
			for (int k = 0; k < A.outerSize(); ++k)
				for (CSparse::InnerIterator it(A, k); it; ++it)
					rows(it.row()) += std::abs(it.value());
			return A.rows() ? rows.maxCoeff() : 0.0;
		}

		double max_abs(const CSparse &A)
		{
			double m = 0;
			for (int k = 0; k < A.nonZeros(); ++k)
				m = std::max(m, std::abs(A.valuePtr()[k]));
			return m;
		}

		double vec_inf(const CVector &v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }
	} // namespace

	// A = [A_BB A_BI; A_IB A_II] with A_II block diagonal; the sparse factor
	// holds S = A_BB - A_BI A_II^-1 A_IB.
	struct Factorization::Condensation
	{
		std::vector<int> outer;  ///< original index per Schur unknown
		std::vector<int> inner;  ///< original index per eliminated unknown
		std::vector<int> start;  ///< first eliminated unknown of each block
		std::vector<Eigen::VectorXd> scale;           ///< symmetric equilibration per block
		std::vector<Eigen::FullPivLU<CMatrix>> local; ///< of the equilibrated block
		CSparse a_bi, inv_ii_a_ib;
		CSparse schur;

		// A_gg^-1 r for the rows r of block g.
		template <typename Rhs>
		CMatrix solve_block(std::size_t g, const Rhs &r) const
		{
			return scale[g].asDiagonal() * local[g].solve(scale[g].asDiagonal() * r);
		}
		CVector solve_interior(const CVector &bi) const
		{
			CVector x(bi.size());
			for (std::size_t g = 0; g < local.size(); ++g)
			{
				const auto n = scale[g].size();
				x.segment(start[g], n) = solve_block(g, bi.segment(start[g], n));
			}
			return x;
		}
	};

	Factorization::Factorization(const CSparse &A, const std::vector<std::vector<int>> &local_blocks) : matrix_(A)
	{
		if (A.rows() != A.cols())
			throw Error("factorization needs a square matrix");
		matrix_.makeCompressed();
		stats_.size = A.rows();
		stats_.condensed_size = A.rows();
		norm_inf_ = norm_inf(matrix_);

		if (!local_blocks.empty() && A.rows() > 0)
		{
			cond_ = condense(matrix_, local_blocks);
			stats_.condensed_size = static_cast<Eigen::Index>(cond_->outer.size());
		}
		const CSparse &F = cond_ ? cond_->schur : matrix_;
		stats_.nnz_matrix = F.nonZeros();
		if (F.rows() == 0)
			return;

		auto lu = std::make_shared<Solver>();
		lu->analyzePattern(F);
		lu->factorize(F);
		if (lu->info() != Eigen::Success)
		{
			const std::string msg = lu->lastErrorMessage();
			const auto at = msg.find("ZERO COLUMN AT ");
			if (at == std::string::npos)
				throw Error("sparse LU failed: " + msg);
			const int permuted = std::stoi(msg.substr(at + 15)) - 1;
			const auto &perm = lu->colsPermutation().indices();
			int dof = permuted;
			for (Eigen::Index i = 0; i < perm.size(); ++i)
				if (perm(i) == permuted)
					dof = static_cast<int>(i);
			if (cond_)
				dof = cond_->outer[dof];
			throw SingularSystemError("singular system: zero pivot at dof " + std::to_string(dof), dof);
		}
		stats_.nnz_factors = lu->stored_entries();
		stats_.fill_ratio = stats_.nnz_matrix ? double(stats_.nnz_factors) / double(stats_.nnz_matrix) : 0.0;
		const double amax = max_abs(F);
		stats_.pivot_growth = amax > 0 ? lu->max_factor_entry() / amax : 0.0;
		lu_ = std::move(lu);
	}

	CVector Factorization::solve(const CVector &rhs, SolveReport *report, int refinement_steps) const
	{
		if (rhs.size() != stats_.size)
			throw Error("right-hand side has size " + std::to_string(rhs.size()) + ", expected " +
			            std::to_string(stats_.size));
		SolveReport r;
		CVector x = CVector::Zero(rhs.size());
		const double bnorm = rhs.norm();
		if (bnorm > 0)
		{
			x = solve_once(rhs);
			for (int s = 0; s < refinement_steps; ++s)
			{
				const CVector res = rhs - matrix_ * x;
				x += solve_once(res);
				++r.refinement_steps;
			}
			const CVector res = rhs - matrix_ * x;
			r.residual = res.norm() / bnorm;
			const double denom = norm_inf_ * vec_inf(x) + vec_inf(rhs);
			r.backward_error = denom > 0 ? vec_inf(res) / denom : 0.0;
			r.warning = !(r.residual <= 1e-9);
		}
		if (report)
			*report = r;
		return x;
	}

	CVector Factorization::solve_once(const CVector &rhs) const
	{
		if (!cond_)
			return lu_ ? CVector(lu_->solve(rhs)) : CVector(CVector::Zero(rhs.size()));
		const auto &c = *cond_;
		CVector bo(c.outer.size()), bi(c.inner.size());
		for (std::size_t k = 0; k < c.outer.size(); ++k)
			bo(k) = rhs(c.outer[k]);
		for (std::size_t k = 0; k < c.inner.size(); ++k)
			bi(k) = rhs(c.inner[k]);
		const CVector yi = c.solve_interior(bi);
		CVector xo = bo - c.a_bi * yi;
		if (lu_)
			xo = lu_->solve(xo);
		const CVector xi = yi - c.inv_ii_a_ib * xo;
		CVector x(rhs.size());
		for (std::size_t k = 0; k < c.outer.size(); ++k)
			x(c.outer[k]) = xo(k);
		for (std::size_t k = 0; k < c.inner.size(); ++k)
			x(c.inner[k]) = xi(k);
		return x;
	}

	std::shared_ptr<const Factorization::Condensation> Factorization::condense(const CSparse &A,
	                                                                           const std::vector<std::vector<int>> &blocks)
	{
		using Triplets = std::vector<Eigen::Triplet<Complex>>;
		{
			const int n = static_cast<int>(A.rows());
			std::vector<int> block_of(n, -1), local(n, -1);
			auto c = std::make_shared<Factorization::Condensation>();
			std::vector<int> block_start;
			for (std::size_t g = 0; g < blocks.size(); ++g)
			{
				block_start.push_back(static_cast<int>(c->inner.size()));
				for (int i : blocks[g])
				{
					if (i < 0 || i >= n || block_of[i] >= 0)
						throw ContractViolation("local blocks must be disjoint sets of valid unknowns");
					block_of[i] = static_cast<int>(g);
					local[i] = static_cast<int>(c->inner.size());
					c->inner.push_back(i);
				}
			}
			for (int i = 0; i < n; ++i)
				if (block_of[i] < 0)
				{
					local[i] = static_cast<int>(c->outer.size());
					c->outer.push_back(i);
				}
			const int no = static_cast<int>(c->outer.size()), ni = static_cast<int>(c->inner.size());

			std::vector<CMatrix> dense(blocks.size());
			for (std::size_t g = 0; g < blocks.size(); ++g)
				dense[g] = CMatrix::Zero(blocks[g].size(), blocks[g].size());
			Triplets bb, bi, ib;
			for (int k = 0; k < A.outerSize(); ++k)
				for (CSparse::InnerIterator it(A, k); it; ++it)
				{
					const int r = static_cast<int>(it.row()), col = static_cast<int>(it.col());
					const int gr = block_of[r], gc = block_of[col];
					if (gr < 0 && gc < 0)
						bb.emplace_back(local[r], local[col], it.value());
					else if (gr < 0)
						bi.emplace_back(local[r], local[col], it.value());
					else if (gc < 0)
						ib.emplace_back(local[r], local[col], it.value());
					else if (gr == gc)
						dense[gr](local[r] - block_start[gr], local[col] - block_start[gc]) = it.value();
					else
						throw ContractViolation("unknowns of different local blocks are coupled");
				}

			// Interior bases are badly scaled; each block is equilibrated
			// symmetrically and kept as a dense LU. Solving with it, rather than
			// multiplying by an explicit inverse, keeps the Schur complement accurate
			// on strongly graded meshes. Only an exactly zero pivot is singular.
			c->start = block_start;
			c->scale.resize(blocks.size());
			c->local.resize(blocks.size());
			for (std::size_t g = 0; g < blocks.size(); ++g)
			{
				c->scale[g] =
					dense[g].diagonal().cwiseAbs().unaryExpr([](double a) { return a > 0 ? 1 / std::sqrt(a) : 1.0; });
				auto &lu = c->local[g];
				lu = Eigen::FullPivLU<CMatrix>(dense[g].rows(), dense[g].cols());
				lu.setThreshold(0.0);
				lu.compute(c->scale[g].asDiagonal() * dense[g] * c->scale[g].asDiagonal());
				if (!lu.isInvertible())
					throw SingularSystemError("singular local block", blocks[g].empty() ? -1 : blocks[g].front());
				dense[g] = CMatrix();
			}
			auto build = [](int rows, int cols, Triplets &t) {
				CSparse m(rows, cols);
				m.setFromTriplets(t.begin(), t.end());
				t.clear();
				t.shrink_to_fit();
				return m;
			};
			const CSparse a_bb = build(no, no, bb);
			c->a_bi = build(no, ni, bi);
			{
				const Eigen::SparseMatrix<Complex, Eigen::RowMajor> a_ib = build(ni, no, ib);
				Triplets x;
				std::vector<int> cols;
				for (std::size_t g = 0; g < blocks.size(); ++g)
				{
					const int first = block_start[g], n = static_cast<int>(blocks[g].size());
					cols.clear();
					for (int r = first; r < first + n; ++r)
						for (decltype(a_ib)::InnerIterator it(a_ib, r); it; ++it)
							cols.push_back(static_cast<int>(it.col()));
					std::sort(cols.begin(), cols.end());
					cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
					CMatrix R = CMatrix::Zero(n, cols.size());
					for (int r = first; r < first + n; ++r)
						for (decltype(a_ib)::InnerIterator it(a_ib, r); it; ++it)
							R(r - first, std::lower_bound(cols.begin(), cols.end(), int(it.col())) - cols.begin()) =
								it.value();
					const CMatrix X = c->solve_block(g, R);
					for (Eigen::Index j = 0; j < X.cols(); ++j)
						for (Eigen::Index i = 0; i < n; ++i)
							x.emplace_back(first + i, cols[j], X(i, j));
				}
				c->inv_ii_a_ib = build(ni, no, x);
			}
			c->schur = a_bb - c->a_bi * c->inv_ii_a_ib;
			c->schur.makeCompressed();
			return c;
		}
	}

	double backward_error(const CSparse &A, const CVector &x, const CVector &b)
	{
		const CVector res = b - A * x;
		const double denom = norm_inf(A) * vec_inf(x) + vec_inf(b);
		return denom > 0 ? vec_inf(res) / denom : 0.0;
	}
} // namespace nhd
