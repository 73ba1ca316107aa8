#include "stokeslab/witnesses.hpp"

#include <cmath>
#include <sstream>

#include "stokeslab/error.hpp"
#include "stokeslab/serialization.hpp"

namespace stokeslab {

namespace {

constexpr double kImagTolerance = 1e-10;

double real_expectation(const QuantumState &state, const BeamOperator &on_a, const BeamOperator &on_b) {
    const auto value = expectation(state, on_a, on_b);
    if (std::abs(value.imag()) > kImagTolerance) {
        throw NumericalGuardError("Hermitian moment with imaginary part " + std::to_string(value.imag()));
    }
    return value.real();
}

FamilyMoments family_moments(const QuantumState &state, const LocalStokes &ls, StokesFamily family) {
    const auto &ops = ls.family(family);
    const auto &sq = ls.family_sq(family);
    const auto &id = ls.identity;
    const bool standard = family == StokesFamily::standard;
    const BeamOperator &weight = standard ? ls.number : ls.vacuum_projector;
    const BeamOperator &weight_sq = standard ? ls.number_sq : ls.vacuum_projector;

    FamilyMoments m;
    for (std::size_t i = 0; i < 3; ++i) {
        m.mean[0][i] = real_expectation(state, ops[i], id);
        m.mean[1][i] = real_expectation(state, id, ops[i]);
        m.square[0][i] = real_expectation(state, sq[i], id);
        m.square[1][i] = real_expectation(state, id, sq[i]);
        m.cross[i] = real_expectation(state, ops[i], ops[i]);
    }
    m.weight = {real_expectation(state, weight, id), real_expectation(state, id, weight)};
    m.weight_sq = {real_expectation(state, weight_sq, id), real_expectation(state, id, weight_sq)};
    m.weight_cross = real_expectation(state, weight, weight);
    if (standard) {
        m.shot_noise = m.weight;
    } else {
        m.shot_noise = {real_expectation(state, ls.pi_inv_n_pi, id), real_expectation(state, id, ls.pi_inv_n_pi)};
    }
    return m;
}

double guarded_sqrt(double argument, SqrtGuard guard, WitnessId id) {
    if (argument < 0.0) {
        if (guard == SqrtGuard::strict && argument < -kSqrtClamp) {
            throw NumericalGuardError("negative square-root argument " + format_double(argument) + " in " +
                                      std::string(witness_name(id)));
        }
        return 0.0;
    }
    return std::sqrt(argument);
}

double sum_sq(const std::array<double, 3> &v) {
    return v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
}

}  // namespace

std::string_view witness_name(WitnessId id) {
    switch (id) {
        case WitnessId::simon_std: return "SIMON_STD";
        case WitnessId::simon_norm: return "SIMON_NORM";
        case WitnessId::gen_std: return "GEN_STD";
        case WitnessId::gen_norm: return "GEN_NORM";
        case WitnessId::cauchy_std: return "CAUCHY_STD";
        case WitnessId::cauchy_norm: return "CAUCHY_NORM";
        case WitnessId::var_std: return "VAR_STD";
        case WitnessId::var_norm: return "VAR_NORM";
        case WitnessId::var_improved_std: return "VAR_IMPROVED_STD";
        case WitnessId::var_improved_norm: return "VAR_IMPROVED_NORM";
    }
    return "?";
}

std::optional<WitnessId> witness_from_name(std::string_view name) {
    for (WitnessId id : kAllWitnesses) {
        if (witness_name(id) == name) {
            return id;
        }
    }
    return std::nullopt;
}

BoundDirection bound_direction(WitnessId id) {
    return id == WitnessId::cauchy_std || id == WitnessId::cauchy_norm ? BoundDirection::lhs_at_most_rhs
                                                                         : BoundDirection::lhs_at_least_rhs;
}

StokesFamily witness_family(WitnessId id) {
    switch (id) {
        case WitnessId::simon_std:
        case WitnessId::gen_std:
        case WitnessId::cauchy_std:
        case WitnessId::var_std:
        case WitnessId::var_improved_std:
            return StokesFamily::standard;
        default:
            return StokesFamily::normalized;
    }
}

FamilyMoments &FamilyMoments::operator+=(const FamilyMoments &o) {
    for (std::size_t x = 0; x < 2; ++x) {
        for (std::size_t i = 0; i < 3; ++i) {
            mean[x][i] += o.mean[x][i];
            square[x][i] += o.square[x][i];
        }
        weight[x] += o.weight[x];
        weight_sq[x] += o.weight_sq[x];
        shot_noise[x] += o.shot_noise[x];
    }
    for (std::size_t i = 0; i < 3; ++i) {
        cross[i] += o.cross[i];
    }
    weight_cross += o.weight_cross;
    return *this;
}

FamilyMoments &FamilyMoments::operator*=(double s) {
    for (std::size_t x = 0; x < 2; ++x) {
        for (std::size_t i = 0; i < 3; ++i) {
            mean[x][i] *= s;
            square[x][i] *= s;
        }
        weight[x] *= s;
        weight_sq[x] *= s;
        shot_noise[x] *= s;
    }
    for (auto &c : cross) {
        c *= s;
    }
    weight_cross *= s;
    return *this;
}

StokesMoments &StokesMoments::operator+=(const StokesMoments &o) {
    standard += o.standard;
    normalized += o.normalized;
    return *this;
}

StokesMoments &StokesMoments::operator*=(double s) {
    standard *= s;
    normalized *= s;
    return *this;
}

StokesMoments stokes_moments(const QuantumState &state) {
    const auto ls = local_stokes(state.truncation().n_max_per_beam);
    return {family_moments(state, *ls, StokesFamily::standard), family_moments(state, *ls, StokesFamily::normalized)};
}

WitnessReport make_report(WitnessId id, double lhs, double rhs) {
    const double margin = bound_direction(id) == BoundDirection::lhs_at_least_rhs ? rhs - lhs : lhs - rhs;
    return {id, lhs, rhs, margin, margin > kViolationTolerance};
}

WitnessReport evaluate_witness(WitnessId id, const StokesMoments &moments, SqrtGuard guard) {
    const FamilyMoments &m = moments.family(witness_family(id));

    double second_moment = 0.0;
    double squared_mean = 0.0;
    double cross_abs = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        second_moment += m.square[0][i] + m.square[1][i] + 2.0 * m.cross[i];
        const double total_mean = m.mean[0][i] + m.mean[1][i];
        squared_mean += total_mean * total_mean;
        cross_abs += std::abs(m.cross[i]);
    }
    const double variance = second_moment - squared_mean;
    const double epr_bound = 2.0 * (m.shot_noise[0] + m.shot_noise[1]);

    switch (id) {
        case WitnessId::simon_std:
        case WitnessId::simon_norm:
            return make_report(id, second_moment, epr_bound);
        case WitnessId::gen_std:
        case WitnessId::gen_norm: {
            const double imbalance = m.weight[0] - m.weight[1];
            return make_report(id, second_moment, epr_bound + imbalance * imbalance);
        }
        case WitnessId::cauchy_std:
        case WitnessId::cauchy_norm:
            return make_report(id, cross_abs, m.weight_cross);
        case WitnessId::var_std:
        case WitnessId::var_norm:
            return make_report(id, variance, epr_bound);
        case WitnessId::var_improved_std:
        case WitnessId::var_improved_norm: {
            const double spread_a = guarded_sqrt(m.weight_sq[0] - sum_sq(m.mean[0]), guard, id);
            const double spread_b = guarded_sqrt(m.weight_sq[1] - sum_sq(m.mean[1]), guard, id);
            const double extra = (spread_a - spread_b) * (spread_a - spread_b);
            return make_report(id, variance, epr_bound + extra);
        }
    }
    throw std::invalid_argument("unknown witness id");
}

std::vector<WitnessReport> evaluate_all(const StokesMoments &moments, SqrtGuard guard) {
    std::vector<WitnessReport> out;
    out.reserve(kAllWitnesses.size());
    for (WitnessId id : kAllWitnesses) {
        out.push_back(evaluate_witness(id, moments, guard));
    }
    return out;
}

WitnessReport eval_witness(WitnessId id, const QuantumState &state) {
    return evaluate_witness(id, stokes_moments(state));
}

std::vector<WitnessReport> eval_all(const QuantumState &state) {
    return evaluate_all(stokes_moments(state));
}

VarianceCrosscheck lhs_crosscheck_variance(const QuantumState &state, StokesFamily family) {
    const Truncation &t = state.truncation();
    const StokesSet set_a = stokes_set(Beam::A, t);
    const StokesSet set_b = stokes_set(Beam::B, t);
    const auto &ops_a = family == StokesFamily::standard ? set_a.standard : set_a.normalized;
    const auto &ops_b = family == StokesFamily::standard ? set_b.standard : set_b.normalized;

    VarianceCrosscheck out;
    for (std::size_t i = 0; i < 3; ++i) {
        const SparseOperator total = ops_a[i] + ops_b[i];
        const double mean = expectation(state, total).real();
        out.direct += expectation(state, compose(total, total).as_hermitian()).real() - mean * mean;
    }

    const FamilyMoments m = stokes_moments(state).family(family);
    for (std::size_t i = 0; i < 3; ++i) {
        const double var_a = m.square[0][i] - m.mean[0][i] * m.mean[0][i];
        const double var_b = m.square[1][i] - m.mean[1][i] * m.mean[1][i];
        const double cov = m.cross[i] - m.mean[0][i] * m.mean[1][i];
        out.decomposed += var_a + var_b + 2.0 * cov;
    }
    return out;
}

std::vector<std::string> dominance_violations(const std::vector<WitnessReport> &reports) {
    auto find = [&](WitnessId id) -> const WitnessReport * {
        for (const auto &r : reports) {
            if (r.id == id) {
                return &r;
            }
        }
        return nullptr;
    };
    std::vector<std::string> out;
    for (const auto &pair : kDominancePairs) {
        const WitnessReport *base = find(pair.base);
        const WitnessReport *improved = find(pair.improved);
        if (base == nullptr || improved == nullptr) {
            continue;
        }
        const std::string names = std::string(witness_name(pair.improved)) + " vs " + std::string(witness_name(pair.base));
        if (improved->rhs - base->rhs < -1e-12) {
            out.push_back(names + ": rhs lower by " + format_double(base->rhs - improved->rhs));
        }
        if (base->entangled && !improved->entangled) {
            out.push_back(names + ": base detects entanglement but improved does not");
        }
    }
    return out;
}

std::string witness_csv_header() {
    return "id,lhs,rhs,margin,entangled";
}

std::string to_csv_row(const WitnessReport &r) {
    std::ostringstream out;
    out << witness_name(r.id) << ',' << format_double(r.lhs) << ',' << format_double(r.rhs) << ','
        << format_double(r.margin) << ',' << (r.entangled ? 1 : 0);
    return out.str();
}

}  // namespace stokeslab
