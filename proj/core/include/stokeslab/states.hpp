#pragma once

#include <cstdint>

#include "stokeslab/beam_operator.hpp"
#include "stokeslab/quantum_state.hpp"

namespace stokeslab {

QuantumState vacuum(const Truncation &truncation);

/// Single basis state |n_AH, n_AV, n_BH, n_BV>.
QuantumState fock_state(const Truncation &truncation, const OccupationState &occupation);

/// Normalized (a_H^dag b_V^dag - a_V^dag b_H^dag)^n |vacuum>: the n-pair
/// polarization singlet. Throws std::invalid_argument if n exceeds the truncation.
QuantumState singlet_sector(int n, const Truncation &truncation);

struct BsvParams {
    double gain = 0.0;
    Truncation truncation;
};

/// Tail mass above which the BSV constructor flags its output.
inline constexpr double kBsvTailTolerance = 1e-6;

/// Probability of the n-pair sector, (1 - t)^2 (n + 1) t^n with t = tanh^2(gain).
double bsv_sector_probability(double gain, int n);
/// Probability carried by sectors n > n_max.
double bsv_tail_mass(double gain, int n_max);
/// Smallest n_max whose tail mass is below `tolerance`.
int bsv_min_truncation(double gain, double tolerance = kBsvTailTolerance);

/// Four-mode bright squeezed vacuum (type-II down-conversion output):
///   cosh^-2(g) sum_n sqrt(n + 1) tanh^n(g) |psi_n>,  |psi_n> = singlet_sector(n).
/// Renormalized after truncation; tail_mass() records the discarded weight.
QuantumState bsv(const BsvParams &params);

/// sum_l p_l |phi_l><phi_l| (x) |chi_l><chi_l| with complex-Gaussian beam
/// states and Dirichlet(1) weights. Deterministic for a given seed.
QuantumState random_separable(std::uint64_t seed, int terms, const Truncation &truncation);

/// Random pure state over the whole truncated space (generally entangled).
QuantumState random_pure(std::uint64_t seed, const Truncation &truncation);

struct NoiseSpec {
    /// Weight of the input state; 1 - p goes to the maximally mixed state.
    double p = 1.0;
};

QuantumState mix_white_noise(const QuantumState &state, const NoiseSpec &spec);

struct LossSpec {
    double eta_a = 1.0;
    double eta_b = 1.0;
};

/// Pure-loss channel with transmission eta_A on both A modes and eta_B on both
/// B modes. The output is in block form; eta_A = eta_B = 1 returns the input.
/// Throws std::length_error if the block form would exceed `max_block_entries`.
QuantumState apply_loss(const QuantumState &state, const LossSpec &spec, std::size_t max_block_entries = 50'000'000);

/// (U_A (x) U_B) rho (U_A (x) U_B)^dag for beam-local unitaries.
QuantumState apply_local_unitary(const QuantumState &state, const BeamOperator &on_a, const BeamOperator &on_b);

}  // namespace stokeslab
