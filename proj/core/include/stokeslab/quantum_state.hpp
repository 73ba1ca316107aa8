#pragma once

#include <complex>
#include <cstddef>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "stokeslab/basis.hpp"
#include "stokeslab/beam_operator.hpp"
#include "stokeslab/sparse_operator.hpp"

namespace stokeslab {

/// Pure vector or density matrix over the truncated basis.
///
/// Mixed states are kept as a convex combination of components so that large
/// truncations stay tractable:
///   - PureTerm: |psi><psi| for a full-space vector (keeps all coherences),
///   - BlockTerm: one dense matrix per (n_A, n_B) photon-number block,
///   - DiagonalTerm: populations diagonal in the occupation basis.
/// BlockTerm has no coherences between different (n_A, n_B) blocks. Every
/// observable, channel, and measurement in this library commutes with both
/// beam number operators, so those coherences never affect a result.
class QuantumState {
   public:
    enum class Kind { pure, mixed };

    struct PureTerm {
        Eigen::VectorXcd amplitudes;
    };
    /// blocks[block_slot(n_a, n_b, n_max)] in the block-local index
    /// h_a * (n_b + 1) + h_b; an empty matrix means the block is zero.
    struct BlockTerm {
        std::vector<Eigen::MatrixXcd> blocks;
    };
    struct DiagonalTerm {
        Eigen::VectorXd populations;
    };
    struct Component {
        double weight = 1.0;
        std::variant<PureTerm, BlockTerm, DiagonalTerm> body;
    };

    /// Largest dimension for which density_matrix() and exact PSD checks run.
    static constexpr std::size_t kDenseLimit = 1296;

    /// Throws std::invalid_argument unless the vector has unit norm within 1e-12.
    static QuantumState pure(Truncation truncation, Eigen::VectorXcd amplitudes, double tail_mass = 0.0);
    /// Throws std::invalid_argument on negative weights or shape mismatches.
    static QuantumState mixture(Truncation truncation, std::vector<Component> components, double tail_mass = 0.0);
    /// Dense density matrix, stored in block form (see class comment).
    static QuantumState from_density(Truncation truncation, const Eigen::MatrixXcd &rho, double tail_mass = 0.0);

    Kind kind() const;
    const Truncation &truncation() const {
        return truncation_;
    }
    std::size_t dimension() const {
        return truncation_.dim();
    }
    /// Probability weight discarded by truncation when the state was prepared.
    double tail_mass() const {
        return tail_mass_;
    }
    const std::vector<Component> &components() const {
        return components_;
    }

    /// Throws std::logic_error for mixed states.
    const Eigen::VectorXcd &pure_vector() const;

    /// Dense D x D matrix. Throws std::length_error above kDenseLimit.
    Eigen::MatrixXcd density_matrix() const;

    /// Block-diagonal part as dense blocks; see BlockTerm for the layout.
    std::vector<Eigen::MatrixXcd> block_density() const;

    double trace() const;

   private:
    QuantumState(Truncation truncation, std::vector<Component> components, double tail_mass);

    Truncation truncation_;
    std::vector<Component> components_;
    double tail_mass_ = 0.0;
};

inline std::size_t block_slot(int n_a, int n_b, int n_max) {
    return static_cast<std::size_t>(n_a) * static_cast<std::size_t>(n_max + 1) + static_cast<std::size_t>(n_b);
}

/// Row-major view of a full-space vector as a beam_dim x beam_dim matrix (rows = beam A).
using BeamMatrixMap = Eigen::Map<const Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;
BeamMatrixMap as_beam_matrix(const Eigen::VectorXcd &amplitudes, const Truncation &truncation);

/// Splits a pure vector into its (n_A, n_B) blocks of |psi><psi|.
std::vector<Eigen::MatrixXcd> dephase_pure(const Eigen::VectorXcd &amplitudes, const Truncation &truncation);

struct StateCheck {
    double trace_error = 0.0;
    double hermiticity_error = 0.0;
    /// Exact for dimension <= kDenseLimit; otherwise a Weyl lower bound built
    /// from per-component minima.
    double min_eigenvalue = 0.0;
    bool min_eigenvalue_exact = true;

    bool ok() const {
        return trace_error <= 1e-12 && hermiticity_error <= 1e-12 && min_eigenvalue >= -1e-10;
    }
};

StateCheck check_invariants(const QuantumState &state);

/// Tr(O rho). For Hermitian-flagged operators the imaginary part must be below
/// 1e-10 (else NumericalGuardError) and is returned as exactly zero.
std::complex<double> expectation(const QuantumState &state, const SparseOperator &op);

/// Tr((X (x) Y) rho) for beam-local operators X on beam A and Y on beam B.
std::complex<double> expectation(const QuantumState &state, const BeamOperator &on_a, const BeamOperator &on_b);

/// <psi|rho|psi> with `reference` pure.
double fidelity(const QuantumState &reference, const QuantumState &other);

/// Tr(rho^2); dense, so limited to kDenseLimit.
double purity(const QuantumState &state);

}  // namespace stokeslab
