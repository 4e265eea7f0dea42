#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace nhd
{
	using Complex = std::complex<double>;

	using Vec2 = Eigen::Vector2d;
	using Mat2 = Eigen::Matrix2d;
	using CVec2 = Eigen::Vector2cd;
	using CMat2 = Eigen::Matrix2cd;

	using RVector = Eigen::VectorXd;
	using CVector = Eigen::VectorXcd;
	using CMatrix = Eigen::MatrixXcd;
	using RMatrix = Eigen::MatrixXd;

	using CSparse = Eigen::SparseMatrix<Complex, Eigen::ColMajor, int>;

	inline constexpr double pi = 3.14159265358979323846;

	/// Rotation by +90 degrees, R(a, b) = (-b, a).
	template <typename Derived>
	Eigen::Matrix<typename Derived::Scalar, 2, 1> rot90(const Eigen::MatrixBase<Derived> &v)
	{
		return {-v(1), v(0)};
	}

	/// 2D scalar cross product a x b.
	template <typename A, typename B>
	auto cross2(const Eigen::MatrixBase<A> &a, const Eigen::MatrixBase<B> &b)
	{
		return a(0) * b(1) - a(1) * b(0);
	}

	/// Unconjugated dot product of two 2-vectors.
	template <typename A, typename B>
	auto dot2(const Eigen::MatrixBase<A> &a, const Eigen::MatrixBase<B> &b)
	{
		return a(0) * b(0) + a(1) * b(1);
	}

	struct Error : std::runtime_error
	{
		using std::runtime_error::runtime_error;
	};

	struct GeometryError : Error
	{
		using Error::Error;
	};

	struct ContractViolation : Error
	{
		using Error::Error;
	};
} // namespace nhd
