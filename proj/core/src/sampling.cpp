#include "stokeslab/sampling.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <variant>

#include "stokeslab/serialization.hpp"

namespace stokeslab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Columns are eigenvectors of Theta_i on sector n, ordered by eigenvalue 2k - n,
// so column k is the state with k photons in mode i.
std::vector<Eigen::MatrixXcd> measurement_bases(StokesIndex basis, int n_max) {
    const auto ls = local_stokes(n_max);
    const BeamOperator &theta = ls->standard[stokes_slot(basis)];
    std::vector<Eigen::MatrixXcd> out;
    out.reserve(static_cast<std::size_t>(n_max) + 1);
    for (int n = 0; n <= n_max; ++n) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(theta.sector(n));
        out.push_back(solver.eigenvectors());
    }
    return out;
}

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream, std::uint64_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(tag)};
    return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64 &engine) {
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

// Distinct outcomes of one basis with their counts, in outcome-index order.
struct Tally {
    std::vector<SampleRecord> records;
    std::vector<double> counts;
    double total = 0.0;
};

Tally tally(const std::vector<SampleRecord> &samples) {
    std::map<std::tuple<int, int, int, int>, double> bins;
    for (const auto &s : samples) {
        bins[{s.n_a_i, s.n_a_perp, s.n_b_i, s.n_b_perp}] += 1.0;
    }
    Tally t;
    for (const auto &[key, count] : bins) {
        const auto [a_i, a_perp, b_i, b_perp] = key;
        t.records.push_back({samples.front().basis, a_i, a_perp, b_i, b_perp});
        t.counts.push_back(count);
    }
    t.total = static_cast<double>(samples.size());
    return t;
}

struct ShotValues {
    double theta_a, theta_b, n_a, n_b;
    double s_a, s_b, pi_a, pi_b, inv_a, inv_b;
};

ShotValues shot_values(const SampleRecord &r) {
    ShotValues v{};
    v.theta_a = r.n_a_i - r.n_a_perp;
    v.theta_b = r.n_b_i - r.n_b_perp;
    v.n_a = r.n_a_i + r.n_a_perp;
    v.n_b = r.n_b_i + r.n_b_perp;
    v.pi_a = v.n_a > 0 ? 1.0 : 0.0;
    v.pi_b = v.n_b > 0 ? 1.0 : 0.0;
    v.inv_a = v.n_a > 0 ? 1.0 / v.n_a : 0.0;
    v.inv_b = v.n_b > 0 ? 1.0 / v.n_b : 0.0;
    v.s_a = v.theta_a * v.inv_a;
    v.s_b = v.theta_b * v.inv_b;
    return v;
}

StokesMoments moments_from_tallies(const std::array<Tally, 3> &tallies,
                                   const std::array<std::vector<double>, 3> &counts) {
    StokesMoments m;
    FamilyMoments &st = m.standard;
    FamilyMoments &nm = m.normalized;
    for (std::size_t slot = 0; slot < 3; ++slot) {
        const Tally &t = tallies[slot];
        const double total = std::accumulate(counts[slot].begin(), counts[slot].end(), 0.0);
        const double w_basis = 1.0 / total;
        const double w_number = w_basis / 3.0;
        for (std::size_t j = 0; j < t.records.size(); ++j) {
            const double c = counts[slot][j];
            if (c == 0.0) {
                continue;
            }
            const ShotValues v = shot_values(t.records[j]);
            const double wb = c * w_basis;
            const double wn = c * w_number;

            st.mean[0][slot] += wb * v.theta_a;
            st.mean[1][slot] += wb * v.theta_b;
            st.square[0][slot] += wb * v.theta_a * v.theta_a;
            st.square[1][slot] += wb * v.theta_b * v.theta_b;
            st.cross[slot] += wb * v.theta_a * v.theta_b;
            st.weight[0] += wn * v.n_a;
            st.weight[1] += wn * v.n_b;
            st.weight_sq[0] += wn * v.n_a * v.n_a;
            st.weight_sq[1] += wn * v.n_b * v.n_b;
            st.weight_cross += wn * v.n_a * v.n_b;

            nm.mean[0][slot] += wb * v.s_a;
            nm.mean[1][slot] += wb * v.s_b;
            nm.square[0][slot] += wb * v.s_a * v.s_a;
            nm.square[1][slot] += wb * v.s_b * v.s_b;
            nm.cross[slot] += wb * v.s_a * v.s_b;
            nm.weight[0] += wn * v.pi_a;
            nm.weight[1] += wn * v.pi_b;
            nm.weight_cross += wn * v.pi_a * v.pi_b;
            nm.shot_noise[0] += wn * v.inv_a;
            nm.shot_noise[1] += wn * v.inv_b;
        }
    }
    st.shot_noise = st.weight;
    nm.weight_sq = nm.weight;
    return m;
}

std::array<Tally, 3> checked_tallies(const BasisSamples &samples) {
    const std::size_t shots = samples.by_basis[0].size();
    std::array<Tally, 3> out;
    for (StokesIndex i : kStokesIndices) {
        const auto &s = samples[i];
        if (s.size() < kMinShotsPerBasis) {
            throw std::invalid_argument("basis " + std::to_string(stokes_number(i)) + " has " +
                                        std::to_string(s.size()) + " shots; at least " +
                                        std::to_string(kMinShotsPerBasis) + " are required");
        }
        if (s.size() != shots) {
            throw std::invalid_argument("all bases must have the same number of shots");
        }
        out[stokes_slot(i)] = tally(s);
    }
    return out;
}

// Multinomial resample of a tally via sequential binomial draws.
std::vector<double> resample(const Tally &t, std::mt19937_64 &engine) {
    std::vector<double> out(t.counts.size(), 0.0);
    auto remaining = static_cast<long long>(t.total);
    double mass = t.total;
    for (std::size_t j = 0; j < t.counts.size() && remaining > 0; ++j) {
        if (j + 1 == t.counts.size()) {
            out[j] = static_cast<double>(remaining);
            break;
        }
        const double p = std::clamp(t.counts[j] / mass, 0.0, 1.0);
        std::binomial_distribution<long long> draw(remaining, p);
        const long long c = draw(engine);
        out[j] = static_cast<double>(c);
        remaining -= c;
        mass -= t.counts[j];
    }
    return out;
}

double sample_std(const std::vector<double> &values) {
    if (values.size() < 2) {
        return 0.0;
    }
    const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    double acc = 0.0;
    for (double v : values) {
        acc += (v - mean) * (v - mean);
    }
    return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

}  // namespace

SampleRecord OutcomeDistribution::record(std::size_t outcome) const {
    const std::size_t beam_dim = truncation.beam_dim();
    const BeamLabel a = beam_label(outcome / beam_dim);
    const BeamLabel b = beam_label(outcome % beam_dim);
    return {basis, a.n_h, a.n_total - a.n_h, b.n_h, b.n_total - b.n_h};
}

std::size_t OutcomeDistribution::outcome_index(const SampleRecord &r) const {
    return beam_index(r.n_a_i + r.n_a_perp, r.n_a_i) * truncation.beam_dim() +
           beam_index(r.n_b_i + r.n_b_perp, r.n_b_i);
}

OutcomeDistribution outcome_distribution(const QuantumState &state, StokesIndex basis) {
    const Truncation &t = state.truncation();
    const int n_max = t.n_max_per_beam;
    const auto beam_dim = static_cast<Eigen::Index>(t.beam_dim());
    const auto v = measurement_bases(basis, n_max);

    OutcomeDistribution dist{basis, t, std::vector<double>(t.dim(), 0.0)};
    auto add_block = [&](int na, int nb, const Eigen::MatrixXd &probs, double weight) {
        for (int ka = 0; ka <= na; ++ka) {
            for (int kb = 0; kb <= nb; ++kb) {
                dist.probabilities[beam_index(na, ka) * t.beam_dim() + beam_index(nb, kb)] += weight * probs(ka, kb);
            }
        }
    };

    for (const auto &c : state.components()) {
        std::visit(overloaded{
                       [&](const QuantumState::PureTerm &p) {
                           const auto psi = as_beam_matrix(p.amplitudes, t);
                           for (int na = 0; na <= n_max; ++na) {
                               for (int nb = 0; nb <= n_max; ++nb) {
                                   const auto block = psi.block(static_cast<Eigen::Index>(sector_offset(na)),
                                                                static_cast<Eigen::Index>(sector_offset(nb)), na + 1,
                                                                nb + 1);
                                   if (block.squaredNorm() == 0.0) {
                                       continue;
                                   }
                                   const Eigen::MatrixXcd amp =
                                       v[static_cast<std::size_t>(na)].adjoint() * block *
                                       v[static_cast<std::size_t>(nb)].conjugate();
                                   add_block(na, nb, amp.cwiseAbs2(), c.weight);
                               }
                           }
                       },
                       [&](const QuantumState::BlockTerm &b) {
                           for (int na = 0; na <= n_max; ++na) {
                               for (int nb = 0; nb <= n_max; ++nb) {
                                   const auto &rho = b.blocks[block_slot(na, nb, n_max)];
                                   if (rho.size() == 0) {
                                       continue;
                                   }
                                   const Eigen::MatrixXcd w = Eigen::kroneckerProduct(
                                       v[static_cast<std::size_t>(na)], v[static_cast<std::size_t>(nb)]);
                                   const Eigen::VectorXd diag = (w.adjoint() * rho * w).diagonal().real();
                                   const Eigen::MatrixXd probs =
                                       Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                                      Eigen::RowMajor>>(diag.data(), na + 1, nb + 1);
                                   add_block(na, nb, probs, c.weight);
                               }
                           }
                       },
                       [&](const QuantumState::DiagonalTerm &d) {
                           const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
                               pops(d.populations.data(), beam_dim, beam_dim);
                           for (int na = 0; na <= n_max; ++na) {
                               for (int nb = 0; nb <= n_max; ++nb) {
                                   const auto block = pops.block(static_cast<Eigen::Index>(sector_offset(na)),
                                                                 static_cast<Eigen::Index>(sector_offset(nb)), na + 1,
                                                                 nb + 1);
                                   if (block.isZero(0.0)) {
                                       continue;
                                   }
                                   const Eigen::MatrixXd probs =
                                       v[static_cast<std::size_t>(na)].cwiseAbs2().transpose() * block *
                                       v[static_cast<std::size_t>(nb)].cwiseAbs2();
                                   add_block(na, nb, probs, c.weight);
                               }
                           }
                       },
                   },
                   c.body);
    }
    for (double &p : dist.probabilities) {
        p = std::max(p, 0.0);
    }
    return dist;
}

std::vector<SampleRecord> sample_counts(const QuantumState &state, StokesIndex basis, std::size_t shots,
                                        std::uint64_t seed) {
    const OutcomeDistribution dist = outcome_distribution(state, basis);
    std::vector<double> cdf(dist.probabilities.size());
    std::partial_sum(dist.probabilities.begin(), dist.probabilities.end(), cdf.begin());
    const double total = cdf.empty() ? 0.0 : cdf.back();
    if (!(total > 0.0)) {
        throw std::invalid_argument("state has no probability mass to sample");
    }

    auto engine = seeded_engine(seed, static_cast<std::uint64_t>(stokes_number(basis)), 0);
    std::vector<SampleRecord> out;
    out.reserve(shots);
    for (std::size_t s = 0; s < shots; ++s) {
        const double u = uniform01(engine) * total;
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) {
            --it;
        }
        // Skip zero-probability outcomes that share the same cumulative value.
        while (dist.probabilities[static_cast<std::size_t>(it - cdf.begin())] == 0.0 && it != cdf.begin()) {
            --it;
        }
        out.push_back(dist.record(static_cast<std::size_t>(it - cdf.begin())));
    }
    return out;
}

BasisSamples sample_all_bases(const QuantumState &state, std::size_t shots_per_basis, std::uint64_t seed) {
    BasisSamples out;
    for (StokesIndex i : kStokesIndices) {
        out[i] = sample_counts(state, i, shots_per_basis, seed);
    }
    return out;
}

StokesMoments estimate_moments(const BasisSamples &samples) {
    const auto tallies = checked_tallies(samples);
    return moments_from_tallies(tallies, {tallies[0].counts, tallies[1].counts, tallies[2].counts});
}

std::vector<EstimateReport> estimate_all(const BasisSamples &samples, const EstimateOptions &options) {
    const auto tallies = checked_tallies(samples);
    const auto point = evaluate_all(
        moments_from_tallies(tallies, {tallies[0].counts, tallies[1].counts, tallies[2].counts}), SqrtGuard::clamp);

    const std::size_t k = kAllWitnesses.size();
    std::vector<std::vector<double>> lhs(k), rhs(k), margin(k);
    for (int r = 0; r < options.bootstrap_resamples; ++r) {
        auto engine = seeded_engine(options.bootstrap_seed, static_cast<std::uint64_t>(r), 1);
        std::array<std::vector<double>, 3> counts;
        for (std::size_t slot = 0; slot < 3; ++slot) {
            counts[slot] = resample(tallies[slot], engine);
        }
        const auto reports = evaluate_all(moments_from_tallies(tallies, counts), SqrtGuard::clamp);
        for (std::size_t w = 0; w < k; ++w) {
            lhs[w].push_back(reports[w].lhs);
            rhs[w].push_back(reports[w].rhs);
            margin[w].push_back(reports[w].margin);
        }
    }

    std::vector<EstimateReport> out;
    out.reserve(k);
    for (std::size_t w = 0; w < k; ++w) {
        out.push_back({point[w].id, point[w].lhs, point[w].rhs, point[w].margin, sample_std(margin[w]),
                       sample_std(lhs[w]), sample_std(rhs[w]), samples.by_basis[0].size()});
    }
    return out;
}

EstimateReport estimate_witness(WitnessId id, const BasisSamples &samples, const EstimateOptions &options) {
    for (const auto &r : estimate_all(samples, options)) {
        if (r.id == id) {
            return r;
        }
    }
    throw std::invalid_argument("unknown witness id");
}

std::string sample_csv_header() {
    return "basis,n_a_i,n_a_perp,n_b_i,n_b_perp";
}

std::string to_csv_row(const SampleRecord &r) {
    std::ostringstream out;
    out << stokes_number(r.basis) << ',' << r.n_a_i << ',' << r.n_a_perp << ',' << r.n_b_i << ',' << r.n_b_perp;
    return out.str();
}

std::string estimate_csv_header() {
    return "id,lhs_hat,rhs_hat,margin_hat,stderr,lhs_stderr,rhs_stderr,shots";
}

std::string to_csv_row(const EstimateReport &r) {
    std::ostringstream out;
    out << witness_name(r.id) << ',' << format_double(r.lhs_hat) << ',' << format_double(r.rhs_hat) << ','
        << format_double(r.margin_hat) << ',' << format_double(r.std_error) << ',' << format_double(r.lhs_std_error)
        << ',' << format_double(r.rhs_std_error) << ',' << r.shots;
    return out.str();
}

}  // namespace stokeslab
