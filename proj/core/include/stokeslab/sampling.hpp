#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "stokeslab/quantum_state.hpp"
#include "stokeslab/stokes.hpp"
#include "stokeslab/witnesses.hpp"

namespace stokeslab {

/// One photon-number-resolved run in polarization basis i: counts in mode i
/// and its orthogonal partner for both beams.
struct SampleRecord {
    StokesIndex basis = StokesIndex::linear;
    int n_a_i = 0;
    int n_a_perp = 0;
    int n_b_i = 0;
    int n_b_perp = 0;

    bool operator==(const SampleRecord &) const = default;
};

/// Exact joint distribution of the four counts in basis i. Outcomes share the
/// layout of basis indices, with the H count replaced by the mode-i count.
struct OutcomeDistribution {
    StokesIndex basis = StokesIndex::linear;
    Truncation truncation;
    std::vector<double> probabilities;

    SampleRecord record(std::size_t outcome) const;
    std::size_t outcome_index(const SampleRecord &record) const;
};

OutcomeDistribution outcome_distribution(const QuantumState &state, StokesIndex basis);

/// i.i.d. draws from outcome_distribution(). The stream for (seed, basis) is
/// mt19937_64 seeded with seed_seq{seed_lo, seed_hi, basis}, so results do
/// not depend on the order in which bases are sampled.
std::vector<SampleRecord> sample_counts(const QuantumState &state, StokesIndex basis, std::size_t shots,
                                        std::uint64_t seed);

struct BasisSamples {
    std::array<std::vector<SampleRecord>, 3> by_basis;

    const std::vector<SampleRecord> &operator[](StokesIndex i) const {
        return by_basis[stokes_slot(i)];
    }
    std::vector<SampleRecord> &operator[](StokesIndex i) {
        return by_basis[stokes_slot(i)];
    }
};

BasisSamples sample_all_bases(const QuantumState &state, std::size_t shots_per_basis, std::uint64_t seed);

struct EstimateOptions {
    int bootstrap_resamples = 200;
    std::uint64_t bootstrap_seed = 0;
};

inline constexpr std::size_t kMinShotsPerBasis = 30;

struct EstimateReport {
    WitnessId id;
    double lhs_hat = 0.0;
    double rhs_hat = 0.0;
    double margin_hat = 0.0;
    /// Bootstrap standard error of margin_hat.
    double std_error = 0.0;
    double lhs_std_error = 0.0;
    double rhs_std_error = 0.0;
    std::size_t shots = 0;  ///< per basis
};

/// Plug-in moment estimates: per-shot theta = n_i - n_perp, s = theta / (n_i + n_perp)
/// (zero on vacuum shots); beam-number moments are averaged over all bases.
/// Throws std::invalid_argument if a basis has fewer than kMinShotsPerBasis shots
/// or the bases differ in shot count.
StokesMoments estimate_moments(const BasisSamples &samples);

std::vector<EstimateReport> estimate_all(const BasisSamples &samples, const EstimateOptions &options = {});
EstimateReport estimate_witness(WitnessId id, const BasisSamples &samples, const EstimateOptions &options = {});

std::string sample_csv_header();
std::string to_csv_row(const SampleRecord &record);
std::string estimate_csv_header();
std::string to_csv_row(const EstimateReport &report);

}  // namespace stokeslab
