#include "stokeslab/states.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace stokeslab {

namespace {

using RowMajorMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double binomial(int n, int k) {
    double out = 1.0;
    for (int j = 1; j <= k; ++j) {
        out = out * (n - k + j) / j;
    }
    return out;
}

void check_probability(double value, const char *what) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
    }
}

std::mt19937_64 seeded_engine(std::uint64_t seed) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
    return std::mt19937_64(seq);
}

Eigen::VectorXcd gaussian_vector(std::mt19937_64 &rng, std::size_t size) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXcd v(static_cast<Eigen::Index>(size));
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        const double re = normal(rng);
        const double im = normal(rng);
        v(k) = {re, im};
    }
    return v.normalized();
}

// Photon count of `mode` for block-local index (h_a, h_b) of block (n_a, n_b).
int mode_count(ModeId mode, int n_a, int h_a, int n_b, int h_b) {
    if (mode.beam == Beam::A) {
        return mode.polarization == Polarization::H ? h_a : n_a - h_a;
    }
    return mode.polarization == Polarization::H ? h_b : n_b - h_b;
}

using Blocks = std::vector<Eigen::MatrixXcd>;

// Pure-loss channel on one mode, acting on a block-form density matrix.
Blocks lose_photons(const Blocks &in, ModeId mode, double eta, int n_max) {
    if (eta == 1.0) {
        return in;
    }
    Blocks out(in.size());
    const bool on_a = mode.beam == Beam::A;
    const bool on_h = mode.polarization == Polarization::H;
    for (int na = 0; na <= n_max; ++na) {
        for (int nb = 0; nb <= n_max; ++nb) {
            const auto &rho = in[block_slot(na, nb, n_max)];
            if (rho.size() == 0) {
                continue;
            }
            const int source_stride = nb + 1;
            const int n_mode_beam = on_a ? na : nb;
            for (int k = 0; k <= n_mode_beam; ++k) {
                const int out_na = on_a ? na - k : na;
                const int out_nb = on_a ? nb : nb - k;
                const int out_stride = out_nb + 1;
                const int out_dim = (out_na + 1) * (out_nb + 1);
                Eigen::MatrixXcd contribution = Eigen::MatrixXcd::Zero(out_dim, out_dim);
                bool touched = false;
                for (Eigen::Index r = 0; r < rho.rows(); ++r) {
                    const int ra = static_cast<int>(r / source_stride);
                    const int rb = static_cast<int>(r % source_stride);
                    const int mr = mode_count(mode, na, ra, nb, rb);
                    if (mr < k) {
                        continue;
                    }
                    // Losing H photons lowers the H label; losing V photons keeps it.
                    const int ra_out = on_a && on_h ? ra - k : ra;
                    const int rb_out = !on_a && on_h ? rb - k : rb;
                    const Eigen::Index r_out = ra_out * out_stride + rb_out;
                    const double kr = std::sqrt(binomial(mr, k) * std::pow(eta, mr - k));
                    for (Eigen::Index c = 0; c < rho.cols(); ++c) {
                        const int ca = static_cast<int>(c / source_stride);
                        const int cb = static_cast<int>(c % source_stride);
                        const int mc = mode_count(mode, na, ca, nb, cb);
                        if (mc < k) {
                            continue;
                        }
                        const int ca_out = on_a && on_h ? ca - k : ca;
                        const int cb_out = !on_a && on_h ? cb - k : cb;
                        const Eigen::Index c_out = ca_out * out_stride + cb_out;
                        const double kc = std::sqrt(binomial(mc, k) * std::pow(eta, mc - k));
                        contribution(r_out, c_out) += kr * kc * std::pow(1.0 - eta, k) * rho(r, c);
                        touched = true;
                    }
                }
                if (!touched) {
                    continue;
                }
                auto &target = out[block_slot(out_na, out_nb, n_max)];
                if (target.size() == 0) {
                    target = std::move(contribution);
                } else {
                    target += contribution;
                }
            }
        }
    }
    return out;
}

Eigen::VectorXd lose_photons_diagonal(const Eigen::VectorXd &in, ModeId mode, double eta,
                                      const std::vector<OccupationState> &basis, const Truncation &t) {
    if (eta == 1.0) {
        return in;
    }
    Eigen::VectorXd out = Eigen::VectorXd::Zero(in.size());
    for (std::size_t j = 0; j < basis.size(); ++j) {
        const double p = in(static_cast<Eigen::Index>(j));
        if (p == 0.0) {
            continue;
        }
        const int m = basis[j].count(mode);
        for (int k = 0; k <= m; ++k) {
            OccupationState target = basis[j];
            target.count(mode) -= k;
            out(static_cast<Eigen::Index>(basis_index(t, target))) +=
                p * binomial(m, k) * std::pow(eta, m - k) * std::pow(1.0 - eta, k);
        }
    }
    return out;
}

std::size_t block_entries_up_to(int max_a, int max_b) {
    std::size_t sa = 0;
    std::size_t sb = 0;
    for (int a = 0; a <= max_a; ++a) {
        sa += static_cast<std::size_t>((a + 1) * (a + 1));
    }
    for (int b = 0; b <= max_b; ++b) {
        sb += static_cast<std::size_t>((b + 1) * (b + 1));
    }
    return sa * sb;
}

}  // namespace

QuantumState vacuum(const Truncation &truncation) {
    return fock_state(truncation, {});
}

QuantumState fock_state(const Truncation &truncation, const OccupationState &occupation) {
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(truncation.dim()));
    psi(static_cast<Eigen::Index>(basis_index(truncation, occupation))) = 1.0;
    return QuantumState::pure(truncation, std::move(psi));
}

QuantumState singlet_sector(int n, const Truncation &truncation) {
    if (n < 0 || n > truncation.n_max_per_beam) {
        throw std::invalid_argument("singlet sector n=" + std::to_string(n) + " outside truncation n_max=" +
                                    std::to_string(truncation.n_max_per_beam));
    }
    // (a_H^dag b_V^dag - a_V^dag b_H^dag)^n |0> = n! sum_k (-1)^(n-k) |k, n-k; n-k, k>
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(truncation.dim()));
    const double amplitude = 1.0 / std::sqrt(static_cast<double>(n + 1));
    for (int k = 0; k <= n; ++k) {
        const double sign = (n - k) % 2 == 0 ? 1.0 : -1.0;
        psi(static_cast<Eigen::Index>(basis_index(truncation, {k, n - k, n - k, k}))) = sign * amplitude;
    }
    return QuantumState::pure(truncation, std::move(psi));
}

double bsv_sector_probability(double gain, int n) {
    const double t = std::pow(std::tanh(gain), 2);
    return (1.0 - t) * (1.0 - t) * (n + 1) * std::pow(t, n);
}

double bsv_tail_mass(double gain, int n_max) {
    const double t = std::pow(std::tanh(gain), 2);
    return std::pow(t, n_max + 1) * ((n_max + 2) - (n_max + 1) * t);
}

int bsv_min_truncation(double gain, double tolerance) {
    if (!(gain >= 0.0)) {
        throw std::invalid_argument("gain must be non-negative");
    }
    for (int n = 0; n <= 1000; ++n) {
        if (bsv_tail_mass(gain, n) < tolerance) {
            return n;
        }
    }
    throw std::invalid_argument("gain too large for a tractable truncation");
}

QuantumState bsv(const BsvParams &params) {
    if (!(params.gain >= 0.0) || !std::isfinite(params.gain)) {
        throw std::invalid_argument("gain must be finite and non-negative");
    }
    const Truncation &t = params.truncation;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(t.dim()));
    for (int n = 0; n <= t.n_max_per_beam; ++n) {
        const double sector_amplitude = std::sqrt(bsv_sector_probability(params.gain, n));
        if (sector_amplitude == 0.0) {
            continue;
        }
        psi += sector_amplitude * singlet_sector(n, t).pure_vector();
    }
    psi /= psi.norm();
    return QuantumState::pure(t, std::move(psi), bsv_tail_mass(params.gain, t.n_max_per_beam));
}

QuantumState random_separable(std::uint64_t seed, int terms, const Truncation &truncation) {
    if (terms < 1) {
        throw std::invalid_argument("random_separable needs terms >= 1");
    }
    auto rng = seeded_engine(seed);
    std::exponential_distribution<double> exponential(1.0);
    std::vector<double> weights(static_cast<std::size_t>(terms));
    std::vector<QuantumState::Component> components;
    double total = 0.0;
    for (auto &w : weights) {
        w = exponential(rng);
        total += w;
    }
    const std::size_t beam_dim = truncation.beam_dim();
    for (int l = 0; l < terms; ++l) {
        const Eigen::VectorXcd phi = gaussian_vector(rng, beam_dim);
        const Eigen::VectorXcd chi = gaussian_vector(rng, beam_dim);
        Eigen::VectorXcd product = Eigen::kroneckerProduct(phi, chi);
        product.normalize();
        components.push_back({weights[static_cast<std::size_t>(l)] / total, QuantumState::PureTerm{std::move(product)}});
    }
    return QuantumState::mixture(truncation, std::move(components));
}

QuantumState random_pure(std::uint64_t seed, const Truncation &truncation) {
    auto rng = seeded_engine(seed);
    return QuantumState::pure(truncation, gaussian_vector(rng, truncation.dim()));
}

QuantumState mix_white_noise(const QuantumState &state, const NoiseSpec &spec) {
    check_probability(spec.p, "noise weight p");
    if (spec.p == 1.0) {
        return state;
    }
    std::vector<QuantumState::Component> components;
    if (spec.p > 0.0) {
        for (auto c : state.components()) {
            c.weight *= spec.p;
            components.push_back(std::move(c));
        }
    }
    const auto dim = static_cast<Eigen::Index>(state.dimension());
    components.push_back({1.0 - spec.p, QuantumState::DiagonalTerm{Eigen::VectorXd::Constant(dim, 1.0 / static_cast<double>(dim))}});
    return QuantumState::mixture(state.truncation(), std::move(components), spec.p * state.tail_mass());
}

QuantumState apply_loss(const QuantumState &state, const LossSpec &spec, std::size_t max_block_entries) {
    check_probability(spec.eta_a, "eta_A");
    check_probability(spec.eta_b, "eta_B");
    if (spec.eta_a == 1.0 && spec.eta_b == 1.0) {
        return state;
    }
    const Truncation &t = state.truncation();
    const int n_max = t.n_max_per_beam;

    // Collect the block-form part (pure + block components) in one set of blocks.
    Blocks blocks((static_cast<std::size_t>(n_max) + 1) * (static_cast<std::size_t>(n_max) + 1));
    bool any_blocks = false;
    int max_a = 0;
    int max_b = 0;
    for (const auto &c : state.components()) {
        if (std::holds_alternative<QuantumState::DiagonalTerm>(c.body)) {
            continue;
        }
        if (const auto *p = std::get_if<QuantumState::PureTerm>(&c.body)) {
            const auto view = as_beam_matrix(p->amplitudes, t);
            for (int na = 0; na <= n_max; ++na) {
                for (int nb = 0; nb <= n_max; ++nb) {
                    if (view.block(static_cast<Eigen::Index>(sector_offset(na)), static_cast<Eigen::Index>(sector_offset(nb)),
                                   na + 1, nb + 1)
                            .squaredNorm() > 0.0) {
                        max_a = std::max(max_a, na);
                        max_b = std::max(max_b, nb);
                    }
                }
            }
        } else {
            const auto &b = std::get<QuantumState::BlockTerm>(c.body);
            for (int na = 0; na <= n_max; ++na) {
                for (int nb = 0; nb <= n_max; ++nb) {
                    if (b.blocks[block_slot(na, nb, n_max)].size() != 0) {
                        max_a = std::max(max_a, na);
                        max_b = std::max(max_b, nb);
                    }
                }
            }
        }
        any_blocks = true;
    }
    if (any_blocks && block_entries_up_to(max_a, max_b) > max_block_entries) {
        throw std::length_error("apply_loss: block form needs " + std::to_string(block_entries_up_to(max_a, max_b)) +
                                " entries; lower n_max");
    }

    std::vector<QuantumState::Component> out;
    for (const auto &c : state.components()) {
        std::visit(overloaded{
                       [&](const QuantumState::PureTerm &p) {
                           const auto dephased = dephase_pure(p.amplitudes, t);
                           for (std::size_t s = 0; s < dephased.size(); ++s) {
                               if (dephased[s].size() == 0) {
                                   continue;
                               }
                               if (blocks[s].size() == 0) {
                                   blocks[s] = c.weight * dephased[s];
                               } else {
                                   blocks[s] += c.weight * dephased[s];
                               }
                           }
                       },
                       [&](const QuantumState::BlockTerm &b) {
                           for (std::size_t s = 0; s < b.blocks.size(); ++s) {
                               if (b.blocks[s].size() == 0) {
                                   continue;
                               }
                               if (blocks[s].size() == 0) {
                                   blocks[s] = c.weight * b.blocks[s];
                               } else {
                                   blocks[s] += c.weight * b.blocks[s];
                               }
                           }
                       },
                       [&](const QuantumState::DiagonalTerm &d) {
                           const auto basis = enumerate_basis(t);
                           Eigen::VectorXd pops = d.populations;
                           for (const ModeId mode : kAllModes) {
                               pops = lose_photons_diagonal(pops, mode, mode.beam == Beam::A ? spec.eta_a : spec.eta_b,
                                                            basis, t);
                           }
                           out.push_back({c.weight, QuantumState::DiagonalTerm{std::move(pops)}});
                       },
                   },
                   c.body);
    }
    if (any_blocks) {
        for (const ModeId mode : kAllModes) {
            blocks = lose_photons(blocks, mode, mode.beam == Beam::A ? spec.eta_a : spec.eta_b, n_max);
        }
        out.insert(out.begin(), QuantumState::Component{1.0, QuantumState::BlockTerm{std::move(blocks)}});
    }
    return QuantumState::mixture(t, std::move(out), state.tail_mass());
}

QuantumState apply_local_unitary(const QuantumState &state, const BeamOperator &on_a, const BeamOperator &on_b) {
    const Truncation &t = state.truncation();
    const int n_max = t.n_max_per_beam;
    if (on_a.n_max() != n_max || on_b.n_max() != n_max) {
        throw std::invalid_argument("unitaries and state built for different truncations");
    }
    auto rotate_block = [&](int na, int nb, const Eigen::MatrixXcd &rho) -> Eigen::MatrixXcd {
        const Eigen::MatrixXcd u = Eigen::kroneckerProduct(on_a.sector(na), on_b.sector(nb));
        return u * rho * u.adjoint();
    };
    std::vector<QuantumState::Component> out;
    for (const auto &c : state.components()) {
        std::visit(overloaded{
                       [&](const QuantumState::PureTerm &p) {
                           Eigen::VectorXcd rotated = Eigen::VectorXcd::Zero(p.amplitudes.size());
                           const auto beam_dim = static_cast<Eigen::Index>(t.beam_dim());
                           Eigen::Map<RowMajorMatrix> dst(rotated.data(), beam_dim, beam_dim);
                           const auto src = as_beam_matrix(p.amplitudes, t);
                           for (int na = 0; na <= n_max; ++na) {
                               for (int nb = 0; nb <= n_max; ++nb) {
                                   const auto oa = static_cast<Eigen::Index>(sector_offset(na));
                                   const auto ob = static_cast<Eigen::Index>(sector_offset(nb));
                                   dst.block(oa, ob, na + 1, nb + 1) =
                                       on_a.sector(na) * src.block(oa, ob, na + 1, nb + 1) * on_b.sector(nb).transpose();
                               }
                           }
                           out.push_back({c.weight, QuantumState::PureTerm{std::move(rotated)}});
                       },
                       [&](const QuantumState::BlockTerm &b) {
                           QuantumState::BlockTerm rotated{Blocks(b.blocks.size())};
                           for (int na = 0; na <= n_max; ++na) {
                               for (int nb = 0; nb <= n_max; ++nb) {
                                   const auto s = block_slot(na, nb, n_max);
                                   if (b.blocks[s].size() != 0) {
                                       rotated.blocks[s] = rotate_block(na, nb, b.blocks[s]);
                                   }
                               }
                           }
                           out.push_back({c.weight, std::move(rotated)});
                       },
                       [&](const QuantumState::DiagonalTerm &d) {
                           const QuantumState only_diag = QuantumState::mixture(t, {{1.0, d}});
                           auto blocks = only_diag.block_density();
                           for (int na = 0; na <= n_max; ++na) {
                               for (int nb = 0; nb <= n_max; ++nb) {
                                   auto &blk = blocks[block_slot(na, nb, n_max)];
                                   if (blk.size() != 0) {
                                       blk = rotate_block(na, nb, blk);
                                   }
                               }
                           }
                           out.push_back({c.weight, QuantumState::BlockTerm{std::move(blocks)}});
                       },
                   },
                   c.body);
    }
    return QuantumState::mixture(t, std::move(out), state.tail_mass());
}

}  // namespace stokeslab
