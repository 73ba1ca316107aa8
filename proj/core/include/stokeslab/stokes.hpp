#pragma once

#include <array>
#include <memory>
#include <string_view>

#include "stokeslab/beam_operator.hpp"
#include "stokeslab/sparse_operator.hpp"

namespace stokeslab {

/// Polarization basis of a Stokes observable: 1 = diagonal/antidiagonal,
/// 2 = circular, 3 = horizontal/vertical.
enum class StokesIndex { diagonal = 1, circular = 2, linear = 3 };

inline constexpr std::array<StokesIndex, 3> kStokesIndices{
    StokesIndex::diagonal, StokesIndex::circular, StokesIndex::linear};

inline constexpr int stokes_number(StokesIndex i) {
    return static_cast<int>(i);
}
inline constexpr std::size_t stokes_slot(StokesIndex i) {
    return static_cast<std::size_t>(static_cast<int>(i) - 1);
}

enum class StokesFamily { standard, normalized };
std::string_view to_string(StokesFamily family);

// Conventions:
//   Theta_3 = n_H - n_V
//   Theta_1 = a_H^dag a_V + a_V^dag a_H            (= n_D - n_A)
//   Theta_2 = -i (a_H^dag a_V - a_V^dag a_H)       (= n_R - n_L)
//   S_i     = Pi (Theta_i / N) Pi,  1/N := 0 on the vacuum sector.

/// Standard Stokes operator on the two-beam space, built from ladder operators.
SparseOperator stokes_standard(Beam beam, StokesIndex i, const Truncation &truncation);
/// Normalized Stokes operator Pi (Theta_i / N) Pi.
SparseOperator stokes_normalized(Beam beam, StokesIndex i, const Truncation &truncation);
/// Pi = I - |0,0><0,0| on one beam.
SparseOperator vacuum_projector(Beam beam, const Truncation &truncation);
/// Pi N^-1 Pi on one beam (diagonal, 1/n on n >= 1, zero on vacuum).
SparseOperator inverse_number(Beam beam, const Truncation &truncation);

struct StokesSet {
    Beam beam;
    std::array<SparseOperator, 3> standard;
    std::array<SparseOperator, 3> normalized;
    SparseOperator vacuum_projector;
    SparseOperator number;
    SparseOperator pi_inv_n_pi;
};

StokesSet stokes_set(Beam beam, const Truncation &truncation);

/// Beam-local, sector-blocked versions of the same observables, plus the
/// squares needed by the witnesses. Both beams share these matrices.
struct LocalStokes {
    int n_max = 0;
    BeamOperator identity;
    std::array<BeamOperator, 3> standard;
    std::array<BeamOperator, 3> normalized;
    std::array<BeamOperator, 3> standard_sq;
    std::array<BeamOperator, 3> normalized_sq;
    BeamOperator number;
    BeamOperator number_sq;
    BeamOperator vacuum_projector;
    BeamOperator pi_inv_n_pi;

    const std::array<BeamOperator, 3> &family(StokesFamily f) const {
        return f == StokesFamily::standard ? standard : normalized;
    }
    const std::array<BeamOperator, 3> &family_sq(StokesFamily f) const {
        return f == StokesFamily::standard ? standard_sq : normalized_sq;
    }
};

/// Builds the sector matrices directly from the ladder matrix elements.
LocalStokes build_local_stokes(int n_max);

/// Process-wide immutable cache, safe to call from several threads.
std::shared_ptr<const LocalStokes> local_stokes(int n_max);

/// Unitary exp(-i angle/2 Theta_axis) on one beam: a rotation of the
/// polarization (Poincare) sphere by `angle` about the given axis.
BeamOperator polarization_rotation(StokesIndex axis, double angle, int n_max);

struct IdentityReport {
    int n_max = 0;
    /// max |sum_i Theta_i^2 - N(N + 2)| over both beams.
    double standard_deviation = 0.0;
    /// max |sum_i S_i^2 - (Pi + 2 Pi N^-1 Pi)| over both beams.
    double normalized_deviation = 0.0;
    /// max |sum_i S_i - (Pi + 2 Pi N^-1 Pi)|: the relation without squares,
    /// which does not hold; reported for reference only.
    double unsquared_normalized_deviation = 0.0;

    static constexpr double kTolerance = 1e-12;
    bool ok() const {
        return standard_deviation < kTolerance && normalized_deviation < kTolerance;
    }
};

IdentityReport verify_identities(const Truncation &truncation);

}  // namespace stokeslab
