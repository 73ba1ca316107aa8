#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "stokeslab/basis.hpp"

namespace stokeslab {

class SparseOperator;

/// Operator acting on a single beam, block-diagonal in that beam's photon number.
///
/// Sector n holds a dense (n + 1) x (n + 1) matrix in the basis |n_H, n - n_H>,
/// n_H ascending. All beam-local observables in this library (Stokes operators,
/// number, vacuum projector, Pi N^-1 Pi) have this shape.
class BeamOperator {
   public:
    using Block = Eigen::MatrixXcd;

    BeamOperator() = default;
    /// Zero operator up to `n_max` photons.
    explicit BeamOperator(int n_max);

    static BeamOperator identity(int n_max);
    /// Diagonal operator whose value on a sector depends only on (n, n_h).
    template <typename F>
    static BeamOperator diagonal(int n_max, F &&value) {
        BeamOperator op(n_max);
        for (int n = 0; n <= n_max; ++n) {
            for (int h = 0; h <= n; ++h) {
                op.sectors_[static_cast<std::size_t>(n)](h, h) = value(n, h);
            }
        }
        return op;
    }

    int n_max() const {
        return static_cast<int>(sectors_.size()) - 1;
    }
    const Block &sector(int n) const {
        return sectors_.at(static_cast<std::size_t>(n));
    }
    Block &sector(int n) {
        return sectors_.at(static_cast<std::size_t>(n));
    }

    /// True only for operators created by identity(); enables fast paths.
    bool is_identity() const {
        return identity_;
    }

    /// Beam-local diagonal, length Truncation{n_max}.beam_dim().
    Eigen::VectorXcd diagonal_entries() const;

    BeamOperator adjoint() const;
    double max_abs_deviation(const BeamOperator &other) const;

    friend BeamOperator operator*(const BeamOperator &lhs, const BeamOperator &rhs);
    friend BeamOperator operator+(const BeamOperator &lhs, const BeamOperator &rhs);
    friend BeamOperator operator-(const BeamOperator &lhs, const BeamOperator &rhs);
    friend BeamOperator operator*(std::complex<double> scale, const BeamOperator &op);

    /// Embeds as O (x) I (beam A) or I (x) O (beam B) on the two-beam space.
    SparseOperator embed(Beam beam, const Truncation &truncation) const;

   private:
    std::vector<Block> sectors_;
    bool identity_ = false;
};

}  // namespace stokeslab
