#include "stokeslab/sparse_operator.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "stokeslab/error.hpp"

namespace stokeslab {

namespace {

using Triplet = Eigen::Triplet<std::complex<double>>;

void require_same_space(const SparseOperator &lhs, const SparseOperator &rhs) {
    if (!(lhs.truncation() == rhs.truncation())) {
        throw DimensionMismatch("operators built for incompatible truncations (n_max " +
                                std::to_string(lhs.truncation().n_max_per_beam) + " vs " +
                                std::to_string(rhs.truncation().n_max_per_beam) + ")");
    }
}

SparseOperator::Matrix from_triplets(const Truncation &truncation, const std::vector<Triplet> &triplets) {
    const auto dim = static_cast<Eigen::Index>(truncation.dim());
    SparseOperator::Matrix m(dim, dim);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return m;
}

}  // namespace

SparseOperator::SparseOperator(Truncation truncation, Matrix matrix, bool hermitian)
    : truncation_(truncation), matrix_(std::move(matrix)), hermitian_(hermitian) {
    const auto dim = static_cast<Eigen::Index>(truncation_.dim());
    if (matrix_.rows() != dim || matrix_.cols() != dim) {
        throw DimensionMismatch("matrix shape does not match the truncation");
    }
    matrix_.makeCompressed();
}

SparseOperator SparseOperator::zero(const Truncation &truncation) {
    return {truncation, from_triplets(truncation, {}), true};
}

SparseOperator SparseOperator::identity(const Truncation &truncation) {
    const auto dim = static_cast<Eigen::Index>(truncation.dim());
    Matrix m(dim, dim);
    m.setIdentity();
    return {truncation, std::move(m), true};
}

SparseOperator::Scalar SparseOperator::at(std::size_t row, std::size_t col) const {
    if (row >= dimension() || col >= dimension()) {
        throw std::out_of_range("operator index out of range");
    }
    return matrix_.coeff(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col));
}

SparseOperator SparseOperator::adjoint() const {
    Matrix m = matrix_.adjoint();
    return {truncation_, std::move(m), hermitian_};
}

SparseOperator SparseOperator::as_hermitian() const {
    Matrix diff = matrix_ - Matrix(matrix_.adjoint());
    for (Eigen::Index k = 0; k < diff.outerSize(); ++k) {
        for (Matrix::InnerIterator it(diff, k); it; ++it) {
            if (std::abs(it.value()) > kHermitianTolerance) {
                throw std::logic_error("operator is not Hermitian");
            }
        }
    }
    return {truncation_, matrix_, true};
}

double SparseOperator::max_abs_entry() const {
    double worst = 0.0;
    for (Eigen::Index k = 0; k < matrix_.outerSize(); ++k) {
        for (Matrix::InnerIterator it(matrix_, k); it; ++it) {
            worst = std::max(worst, std::abs(it.value()));
        }
    }
    return worst;
}

double SparseOperator::max_abs_deviation(const SparseOperator &other) const {
    require_same_space(*this, other);
    return SparseOperator(truncation_, matrix_ - other.matrix_).max_abs_entry();
}

bool SparseOperator::conserves_beam_numbers() const {
    const std::size_t beam_dim = truncation_.beam_dim();
    for (Eigen::Index k = 0; k < matrix_.outerSize(); ++k) {
        const auto row = static_cast<std::size_t>(k);
        const int row_a = beam_label(row / beam_dim).n_total;
        const int row_b = beam_label(row % beam_dim).n_total;
        for (Matrix::InnerIterator it(matrix_, k); it; ++it) {
            if (it.value() == Scalar(0.0, 0.0)) {
                continue;
            }
            const auto col = static_cast<std::size_t>(it.col());
            if (beam_label(col / beam_dim).n_total != row_a || beam_label(col % beam_dim).n_total != row_b) {
                return false;
            }
        }
    }
    return true;
}

SparseOperator compose(const SparseOperator &lhs, const SparseOperator &rhs) {
    require_same_space(lhs, rhs);
    SparseOperator::Matrix m = lhs.matrix() * rhs.matrix();
    m.prune(SparseOperator::Scalar(0.0, 0.0));
    return {lhs.truncation(), std::move(m)};
}

SparseOperator compose(std::initializer_list<SparseOperator> chain) {
    if (chain.size() == 0) {
        throw std::invalid_argument("compose needs at least one operator");
    }
    auto it = chain.begin();
    SparseOperator out = *it;
    for (++it; it != chain.end(); ++it) {
        out = compose(out, *it);
    }
    return out;
}

SparseOperator operator+(const SparseOperator &lhs, const SparseOperator &rhs) {
    require_same_space(lhs, rhs);
    SparseOperator::Matrix m = lhs.matrix() + rhs.matrix();
    return {lhs.truncation(), std::move(m), lhs.hermitian() && rhs.hermitian()};
}

SparseOperator operator-(const SparseOperator &lhs, const SparseOperator &rhs) {
    require_same_space(lhs, rhs);
    SparseOperator::Matrix m = lhs.matrix() - rhs.matrix();
    return {lhs.truncation(), std::move(m), lhs.hermitian() && rhs.hermitian()};
}

SparseOperator operator*(std::complex<double> scale, const SparseOperator &op) {
    SparseOperator::Matrix m = scale * op.matrix();
    return {op.truncation(), std::move(m), op.hermitian() && scale.imag() == 0.0};
}

SparseOperator ladder(ModeId mode, LadderKind kind, const Truncation &truncation) {
    std::vector<Triplet> triplets;
    for (std::size_t col = 0; col < truncation.dim(); ++col) {
        OccupationState target = basis_state(truncation, col);
        int &n = target.count(mode);
        if (kind == LadderKind::raise) {
            const double amplitude = std::sqrt(static_cast<double>(n + 1));
            ++n;
            if (!target.fits(truncation)) {
                continue;
            }
            triplets.emplace_back(static_cast<Eigen::Index>(basis_index(truncation, target)),
                                  static_cast<Eigen::Index>(col), amplitude);
        } else {
            if (n == 0) {
                continue;
            }
            const double amplitude = std::sqrt(static_cast<double>(n));
            --n;
            triplets.emplace_back(static_cast<Eigen::Index>(basis_index(truncation, target)),
                                  static_cast<Eigen::Index>(col), amplitude);
        }
    }
    return {truncation, from_triplets(truncation, triplets)};
}

SparseOperator mode_number_op(ModeId mode, const Truncation &truncation) {
    return compose(ladder(mode, LadderKind::raise, truncation), ladder(mode, LadderKind::lower, truncation))
        .as_hermitian();
}

SparseOperator number_op(Beam beam, const Truncation &truncation) {
    return (mode_number_op({beam, Polarization::H}, truncation) + mode_number_op({beam, Polarization::V}, truncation))
        .as_hermitian();
}

}  // namespace stokeslab
