#include "stokeslab/beam_operator.hpp"

#include <stdexcept>
#include <vector>

#include <Eigen/SparseCore>

#include "stokeslab/error.hpp"
#include "stokeslab/sparse_operator.hpp"

namespace stokeslab {

namespace {

void require_same_cutoff(const BeamOperator &lhs, const BeamOperator &rhs) {
    if (lhs.n_max() != rhs.n_max()) {
        throw DimensionMismatch("beam operators built for different truncations");
    }
}

template <typename F>
BeamOperator sectorwise(const BeamOperator &lhs, const BeamOperator &rhs, F &&f) {
    require_same_cutoff(lhs, rhs);
    BeamOperator out(lhs.n_max());
    for (int n = 0; n <= lhs.n_max(); ++n) {
        out.sector(n) = f(lhs.sector(n), rhs.sector(n));
    }
    return out;
}

}  // namespace

BeamOperator::BeamOperator(int n_max) {
    if (n_max < 0) {
        throw std::invalid_argument("n_max must be non-negative");
    }
    sectors_.reserve(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) {
        sectors_.push_back(Block::Zero(n + 1, n + 1));
    }
}

BeamOperator BeamOperator::identity(int n_max) {
    BeamOperator op(n_max);
    for (auto &block : op.sectors_) {
        block.setIdentity();
    }
    op.identity_ = true;
    return op;
}

Eigen::VectorXcd BeamOperator::diagonal_entries() const {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(Truncation{n_max()}.beam_dim()));
    for (int n = 0; n <= n_max(); ++n) {
        out.segment(static_cast<Eigen::Index>(sector_offset(n)), n + 1) = sector(n).diagonal();
    }
    return out;
}

BeamOperator BeamOperator::adjoint() const {
    BeamOperator out(n_max());
    for (int n = 0; n <= n_max(); ++n) {
        out.sector(n) = sector(n).adjoint();
    }
    out.identity_ = identity_;
    return out;
}

double BeamOperator::max_abs_deviation(const BeamOperator &other) const {
    require_same_cutoff(*this, other);
    double worst = 0.0;
    for (int n = 0; n <= n_max(); ++n) {
        worst = std::max(worst, (sector(n) - other.sector(n)).cwiseAbs().maxCoeff());
    }
    return worst;
}

BeamOperator operator*(const BeamOperator &lhs, const BeamOperator &rhs) {
    if (lhs.is_identity()) {
        require_same_cutoff(lhs, rhs);
        return rhs;
    }
    if (rhs.is_identity()) {
        require_same_cutoff(lhs, rhs);
        return lhs;
    }
    return sectorwise(lhs, rhs, [](const auto &a, const auto &b) -> BeamOperator::Block { return a * b; });
}

BeamOperator operator+(const BeamOperator &lhs, const BeamOperator &rhs) {
    return sectorwise(lhs, rhs, [](const auto &a, const auto &b) -> BeamOperator::Block { return a + b; });
}

BeamOperator operator-(const BeamOperator &lhs, const BeamOperator &rhs) {
    return sectorwise(lhs, rhs, [](const auto &a, const auto &b) -> BeamOperator::Block { return a - b; });
}

BeamOperator operator*(std::complex<double> scale, const BeamOperator &op) {
    BeamOperator out(op.n_max());
    for (int n = 0; n <= op.n_max(); ++n) {
        out.sector(n) = scale * op.sector(n);
    }
    return out;
}

SparseOperator BeamOperator::embed(Beam beam, const Truncation &truncation) const {
    if (truncation.n_max_per_beam != n_max()) {
        throw DimensionMismatch("beam operator and truncation disagree on n_max");
    }
    const auto beam_dim = static_cast<Eigen::Index>(truncation.beam_dim());
    std::vector<Eigen::Triplet<std::complex<double>>> local;
    for (int n = 0; n <= n_max(); ++n) {
        const auto off = static_cast<Eigen::Index>(sector_offset(n));
        const auto &block = sector(n);
        for (Eigen::Index r = 0; r < block.rows(); ++r) {
            for (Eigen::Index c = 0; c < block.cols(); ++c) {
                if (block(r, c) != std::complex<double>(0.0, 0.0)) {
                    local.emplace_back(off + r, off + c, block(r, c));
                }
            }
        }
    }
    std::vector<Eigen::Triplet<std::complex<double>>> full;
    full.reserve(local.size() * static_cast<std::size_t>(beam_dim));
    for (const auto &t : local) {
        for (Eigen::Index k = 0; k < beam_dim; ++k) {
            if (beam == Beam::A) {
                full.emplace_back(t.row() * beam_dim + k, t.col() * beam_dim + k, t.value());
            } else {
                full.emplace_back(k * beam_dim + t.row(), k * beam_dim + t.col(), t.value());
            }
        }
    }
    const auto dim = static_cast<Eigen::Index>(truncation.dim());
    SparseOperator::Matrix m(dim, dim);
    m.setFromTriplets(full.begin(), full.end());
    return SparseOperator(truncation, std::move(m));
}

}  // namespace stokeslab
