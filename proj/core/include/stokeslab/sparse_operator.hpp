#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>

#include <Eigen/SparseCore>

#include "stokeslab/basis.hpp"

namespace stokeslab {

/// Sparse complex matrix over the truncated two-beam basis.
class SparseOperator {
   public:
    using Scalar = std::complex<double>;
    using Matrix = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

    /// Tolerance used when a builder asks for the Hermitian flag to be set.
    static constexpr double kHermitianTolerance = 1e-14;

    SparseOperator(Truncation truncation, Matrix matrix, bool hermitian = false);

    static SparseOperator zero(const Truncation &truncation);
    static SparseOperator identity(const Truncation &truncation);

    const Truncation &truncation() const {
        return truncation_;
    }
    std::size_t dimension() const {
        return static_cast<std::size_t>(matrix_.rows());
    }
    bool hermitian() const {
        return hermitian_;
    }
    const Matrix &matrix() const {
        return matrix_;
    }

    Scalar at(std::size_t row, std::size_t col) const;
    std::size_t nonzeros() const {
        return static_cast<std::size_t>(matrix_.nonZeros());
    }

    SparseOperator adjoint() const;

    /// Returns a copy flagged Hermitian. Throws std::logic_error if the matrix
    /// differs from its adjoint by more than kHermitianTolerance.
    SparseOperator as_hermitian() const;

    double max_abs_deviation(const SparseOperator &other) const;
    double max_abs_entry() const;

    /// True iff no nonzero element connects different (n_A, n_B) blocks,
    /// i.e. the operator commutes with both beam number operators.
    bool conserves_beam_numbers() const;

   private:
    Truncation truncation_;
    Matrix matrix_;
    bool hermitian_;
};

/// Matrix product lhs * rhs.
SparseOperator compose(const SparseOperator &lhs, const SparseOperator &rhs);
/// Left-to-right product of a chain; compose({a, b, c}) == a * b * c.
SparseOperator compose(std::initializer_list<SparseOperator> chain);

SparseOperator operator+(const SparseOperator &lhs, const SparseOperator &rhs);
SparseOperator operator-(const SparseOperator &lhs, const SparseOperator &rhs);
SparseOperator operator*(std::complex<double> scale, const SparseOperator &op);
inline SparseOperator operator*(double scale, const SparseOperator &op) {
    return std::complex<double>(scale, 0.0) * op;
}

enum class LadderKind { raise, lower };

/// Creation or annihilation operator on one mode. Raising out of the truncated
/// space maps to zero.
SparseOperator ladder(ModeId mode, LadderKind kind, const Truncation &truncation);

/// a^dagger a on one mode.
SparseOperator mode_number_op(ModeId mode, const Truncation &truncation);

/// Total photon number of a beam, N^X = n_XH + n_XV.
SparseOperator number_op(Beam beam, const Truncation &truncation);

}  // namespace stokeslab
