#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <string>
#include <vector>

namespace stokeslab {

enum class Beam { A, B };
enum class Polarization { H, V };

struct ModeId {
    Beam beam;
    Polarization polarization;

    auto operator<=>(const ModeId &) const = default;
};

inline constexpr std::array<ModeId, 4> kAllModes{{
    {Beam::A, Polarization::H},
    {Beam::A, Polarization::V},
    {Beam::B, Polarization::H},
    {Beam::B, Polarization::V},
}};

inline constexpr std::array<Beam, 2> kBothBeams{Beam::A, Beam::B};

std::string to_string(ModeId mode);
std::string to_string(Beam beam);

/// Cutoff on the total photon number carried by each beam.
///
/// Every operator in this library conserves the per-beam photon number, so the
/// truncation is exact for operators; only state preparation loses a tail.
struct Truncation {
    int n_max_per_beam = 0;

    /// Size of one beam's two-mode space: sum over n <= n_max of (n + 1).
    std::size_t beam_dim() const {
        auto n = static_cast<std::size_t>(n_max_per_beam);
        return (n + 1) * (n + 2) / 2;
    }

    std::size_t dim() const {
        return beam_dim() * beam_dim();
    }

    bool operator==(const Truncation &) const = default;
};

/// Photon counts in (A:H, A:V, B:H, B:V).
struct OccupationState {
    int n_ah = 0;
    int n_av = 0;
    int n_bh = 0;
    int n_bv = 0;

    int beam_total(Beam beam) const {
        return beam == Beam::A ? n_ah + n_av : n_bh + n_bv;
    }
    int count(ModeId mode) const;
    int &count(ModeId mode);

    bool fits(const Truncation &truncation) const;

    bool operator==(const OccupationState &) const = default;
};

/// Offset of the n-photon sector inside one beam's space. Within a sector the
/// states are ordered by ascending H count.
constexpr std::size_t sector_offset(int n) {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(n + 1) / 2;
}

constexpr std::size_t beam_index(int n_total, int n_h) {
    return sector_offset(n_total) + static_cast<std::size_t>(n_h);
}

/// Canonical index: lexicographic in (n_A_total, n_AH, n_B_total, n_BH).
/// Equivalently beam_index(A) * beam_dim + beam_index(B), i.e. a Kronecker
/// product of the two beam spaces with beam A as the slow index.
std::size_t basis_index(const Truncation &truncation, const OccupationState &state);

OccupationState basis_state(const Truncation &truncation, std::size_t index);

std::vector<OccupationState> enumerate_basis(const Truncation &truncation);

/// Number of photons and H count for a beam-local index.
struct BeamLabel {
    int n_total;
    int n_h;
};
BeamLabel beam_label(std::size_t beam_local_index);

}  // namespace stokeslab
