#include "stokeslab/basis.hpp"

#include <cmath>
#include <stdexcept>

namespace stokeslab {

std::string to_string(Beam beam) {
    return beam == Beam::A ? "A" : "B";
}

std::string to_string(ModeId mode) {
    return to_string(mode.beam) + (mode.polarization == Polarization::H ? "H" : "V");
}

int OccupationState::count(ModeId mode) const {
    if (mode.beam == Beam::A) {
        return mode.polarization == Polarization::H ? n_ah : n_av;
    }
    return mode.polarization == Polarization::H ? n_bh : n_bv;
}

int &OccupationState::count(ModeId mode) {
    if (mode.beam == Beam::A) {
        return mode.polarization == Polarization::H ? n_ah : n_av;
    }
    return mode.polarization == Polarization::H ? n_bh : n_bv;
}

bool OccupationState::fits(const Truncation &truncation) const {
    return n_ah >= 0 && n_av >= 0 && n_bh >= 0 && n_bv >= 0 &&
           beam_total(Beam::A) <= truncation.n_max_per_beam && beam_total(Beam::B) <= truncation.n_max_per_beam;
}

BeamLabel beam_label(std::size_t beam_local_index) {
    // Largest n with n(n+1)/2 <= index.
    auto n = static_cast<int>((std::sqrt(8.0 * static_cast<double>(beam_local_index) + 1.0) - 1.0) / 2.0);
    while (sector_offset(n + 1) <= beam_local_index) {
        ++n;
    }
    while (sector_offset(n) > beam_local_index) {
        --n;
    }
    return {n, static_cast<int>(beam_local_index - sector_offset(n))};
}

std::size_t basis_index(const Truncation &truncation, const OccupationState &state) {
    if (!state.fits(truncation)) {
        throw std::out_of_range("occupation state outside the truncated space");
    }
    return beam_index(state.beam_total(Beam::A), state.n_ah) * truncation.beam_dim() +
           beam_index(state.beam_total(Beam::B), state.n_bh);
}

OccupationState basis_state(const Truncation &truncation, std::size_t index) {
    if (index >= truncation.dim()) {
        throw std::out_of_range("basis index outside the truncated space");
    }
    auto a = beam_label(index / truncation.beam_dim());
    auto b = beam_label(index % truncation.beam_dim());
    return {a.n_h, a.n_total - a.n_h, b.n_h, b.n_total - b.n_h};
}

std::vector<OccupationState> enumerate_basis(const Truncation &truncation) {
    if (truncation.n_max_per_beam < 0) {
        throw std::invalid_argument("n_max_per_beam must be non-negative");
    }
    std::vector<OccupationState> out;
    out.reserve(truncation.dim());
    const int n_max = truncation.n_max_per_beam;
    for (int na = 0; na <= n_max; ++na) {
        for (int ah = 0; ah <= na; ++ah) {
            for (int nb = 0; nb <= n_max; ++nb) {
                for (int bh = 0; bh <= nb; ++bh) {
                    out.push_back({ah, na - ah, bh, nb - bh});
                }
            }
        }
    }
    return out;
}

}  // namespace stokeslab
