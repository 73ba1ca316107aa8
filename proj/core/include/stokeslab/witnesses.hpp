#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stokeslab/quantum_state.hpp"
#include "stokeslab/stokes.hpp"

namespace stokeslab {

/// The ten separability conditions. Each is an inequality obeyed by every
/// separable state; a violation certifies entanglement.
enum class WitnessId {
    simon_std,          ///< sum_i <(Th_i^A + Th_i^B)^2> >= 2<N^A + N^B>
    simon_norm,         ///< sum_i <(S_i^A + S_i^B)^2> >= <2 Pi^A/N^A + 2 Pi^B/N^B>
    gen_std,            ///< as simon_std, rhs + <N^A - N^B>^2
    gen_norm,           ///< as simon_norm, rhs + <Pi^A - Pi^B>^2
    cauchy_std,         ///< sum_i |<Th_i^A Th_i^B>| <= <N^A N^B>
    cauchy_norm,        ///< sum_i |<S_i^A S_i^B>| <= <Pi^A Pi^B>
    var_std,            ///< sum_i Var(Th_i^A + Th_i^B) >= 2<N^A + N^B>
    var_norm,           ///< sum_i Var(S_i^A + S_i^B) >= 2<Pi^A/N^A + Pi^B/N^B>
    var_improved_std,   ///< var_std rhs + (sqrt(<N^A^2> - |<Th^A>|^2) - sqrt(<N^B^2> - |<Th^B>|^2))^2
    var_improved_norm,  ///< var_norm rhs + (sqrt(<Pi^A> - |<S^A>|^2) - sqrt(<Pi^B> - |<S^B>|^2))^2
};

inline constexpr std::array<WitnessId, 10> kAllWitnesses{
    WitnessId::simon_std,  WitnessId::simon_norm,  WitnessId::gen_std,          WitnessId::gen_norm,
    WitnessId::cauchy_std, WitnessId::cauchy_norm, WitnessId::var_std,          WitnessId::var_norm,
    WitnessId::var_improved_std, WitnessId::var_improved_norm,
};

/// Direction of the separable-state bound: lhs >= rhs or lhs <= rhs.
enum class BoundDirection { lhs_at_least_rhs, lhs_at_most_rhs };

std::string_view witness_name(WitnessId id);
std::optional<WitnessId> witness_from_name(std::string_view name);
BoundDirection bound_direction(WitnessId id);
StokesFamily witness_family(WitnessId id);

/// Improved variance condition paired with its base condition.
struct DominancePair {
    WitnessId base;
    WitnessId improved;
};
inline constexpr std::array<DominancePair, 2> kDominancePairs{{
    {WitnessId::var_std, WitnessId::var_improved_std},
    {WitnessId::var_norm, WitnessId::var_improved_norm},
}};

/// A report is entangled iff margin > kViolationTolerance.
inline constexpr double kViolationTolerance = 1e-9;
/// Square-root arguments in [-kSqrtClamp, 0) are clamped to zero.
inline constexpr double kSqrtClamp = 1e-10;

struct WitnessReport {
    WitnessId id;
    double lhs = 0.0;
    double rhs = 0.0;
    /// rhs - lhs for >=-type conditions, lhs - rhs for <=-type; positive means violated.
    double margin = 0.0;
    bool entangled = false;
};

WitnessReport make_report(WitnessId id, double lhs, double rhs);

/// First and second moments of one Stokes family that the ten conditions use.
/// Index [0] is beam A, [1] is beam B. "weight" is N (standard) or Pi
/// (normalized); "shot_noise" is N (standard) or Pi N^-1 Pi (normalized).
struct FamilyMoments {
    std::array<std::array<double, 3>, 2> mean{};    ///< <O_i^X>
    std::array<std::array<double, 3>, 2> square{};  ///< <(O_i^X)^2>
    std::array<double, 3> cross{};                  ///< <O_i^A O_i^B>
    std::array<double, 2> weight{};                 ///< <W^X>
    std::array<double, 2> weight_sq{};              ///< <(W^X)^2>
    double weight_cross = 0.0;                      ///< <W^A W^B>
    std::array<double, 2> shot_noise{};

    FamilyMoments &operator+=(const FamilyMoments &other);
    FamilyMoments &operator*=(double scale);
};

struct StokesMoments {
    FamilyMoments standard;
    FamilyMoments normalized;

    const FamilyMoments &family(StokesFamily f) const {
        return f == StokesFamily::standard ? standard : normalized;
    }
    StokesMoments &operator+=(const StokesMoments &other);
    StokesMoments &operator*=(double scale);
};

/// Exact moments via beam-local expectations. Moments are linear in the state.
StokesMoments stokes_moments(const QuantumState &state);

enum class SqrtGuard {
    /// Throw NumericalGuardError for arguments below -kSqrtClamp.
    strict,
    /// Clamp every negative argument to zero (sampled estimates).
    clamp,
};

WitnessReport evaluate_witness(WitnessId id, const StokesMoments &moments, SqrtGuard guard = SqrtGuard::strict);
std::vector<WitnessReport> evaluate_all(const StokesMoments &moments, SqrtGuard guard = SqrtGuard::strict);

WitnessReport eval_witness(WitnessId id, const QuantumState &state);
/// All ten, in kAllWitnesses order.
std::vector<WitnessReport> eval_all(const QuantumState &state);

/// Variance lhs computed two ways: directly as sum_i Var(O_i^A + O_i^B) from
/// full-space operators, and as local variances plus twice the covariances
/// from beam-local moments.
struct VarianceCrosscheck {
    double direct = 0.0;
    double decomposed = 0.0;
};
VarianceCrosscheck lhs_crosscheck_variance(const QuantumState &state, StokesFamily family);

/// Human-readable descriptions of dominance failures in one eval_all() result:
/// improved rhs below base rhs by more than 1e-12, or base detecting while the
/// improved condition does not. Empty when everything holds.
std::vector<std::string> dominance_violations(const std::vector<WitnessReport> &reports);

std::string witness_csv_header();
std::string to_csv_row(const WitnessReport &report);

}  // namespace stokeslab
