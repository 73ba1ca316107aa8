#include "stokeslab/stokes.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include <Eigen/Eigenvalues>

namespace stokeslab {

namespace {

using Triplet = Eigen::Triplet<std::complex<double>>;
constexpr std::complex<double> kI(0.0, 1.0);

ModeId h_mode(Beam beam) {
    return {beam, Polarization::H};
}
ModeId v_mode(Beam beam) {
    return {beam, Polarization::V};
}

// Diagonal full-space operator whose entry depends on the beam's photon number.
template <typename F>
SparseOperator beam_number_function(Beam beam, const Truncation &truncation, F &&f) {
    std::vector<Triplet> triplets;
    for (std::size_t k = 0; k < truncation.dim(); ++k) {
        const double v = f(basis_state(truncation, k).beam_total(beam));
        if (v != 0.0) {
            triplets.emplace_back(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k), v);
        }
    }
    const auto dim = static_cast<Eigen::Index>(truncation.dim());
    SparseOperator::Matrix m(dim, dim);
    m.setFromTriplets(triplets.begin(), triplets.end());
    return {truncation, std::move(m), true};
}

// Sector matrix of a_H^dag a_V: |h, n-h> -> sqrt((h+1)(n-h)) |h+1, n-h-1>.
Eigen::MatrixXcd hop_h_from_v(int n) {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n + 1, n + 1);
    for (int h = 0; h < n; ++h) {
        m(h + 1, h) = std::sqrt(static_cast<double>((h + 1) * (n - h)));
    }
    return m;
}

}  // namespace

std::string_view to_string(StokesFamily family) {
    return family == StokesFamily::standard ? "standard" : "normalized";
}

SparseOperator stokes_standard(Beam beam, StokesIndex i, const Truncation &truncation) {
    const auto raise_h = ladder(h_mode(beam), LadderKind::raise, truncation);
    const auto raise_v = ladder(v_mode(beam), LadderKind::raise, truncation);
    const auto lower_h = ladder(h_mode(beam), LadderKind::lower, truncation);
    const auto lower_v = ladder(v_mode(beam), LadderKind::lower, truncation);
    switch (i) {
        case StokesIndex::linear:
            return (compose(raise_h, lower_h) - compose(raise_v, lower_v)).as_hermitian();
        case StokesIndex::diagonal:
            return (compose(raise_h, lower_v) + compose(raise_v, lower_h)).as_hermitian();
        case StokesIndex::circular:
            return (-kI * (compose(raise_h, lower_v) - compose(raise_v, lower_h))).as_hermitian();
    }
    throw std::invalid_argument("invalid Stokes index");
}

SparseOperator vacuum_projector(Beam beam, const Truncation &truncation) {
    return beam_number_function(beam, truncation, [](int n) { return n > 0 ? 1.0 : 0.0; });
}

SparseOperator inverse_number(Beam beam, const Truncation &truncation) {
    return beam_number_function(beam, truncation, [](int n) { return n > 0 ? 1.0 / n : 0.0; });
}

SparseOperator stokes_normalized(Beam beam, StokesIndex i, const Truncation &truncation) {
    const auto pi = vacuum_projector(beam, truncation);
    const auto theta_over_n = compose(stokes_standard(beam, i, truncation), inverse_number(beam, truncation));
    return compose({pi, theta_over_n, pi}).as_hermitian();
}

StokesSet stokes_set(Beam beam, const Truncation &truncation) {
    auto pi = vacuum_projector(beam, truncation);
    auto n = number_op(beam, truncation);
    auto pi_inv = inverse_number(beam, truncation);
    return StokesSet{
        beam,
        {stokes_standard(beam, StokesIndex::diagonal, truncation), stokes_standard(beam, StokesIndex::circular, truncation),
         stokes_standard(beam, StokesIndex::linear, truncation)},
        {stokes_normalized(beam, StokesIndex::diagonal, truncation),
         stokes_normalized(beam, StokesIndex::circular, truncation),
         stokes_normalized(beam, StokesIndex::linear, truncation)},
        std::move(pi),
        std::move(n),
        std::move(pi_inv),
    };
}

LocalStokes build_local_stokes(int n_max) {
    LocalStokes s;
    s.n_max = n_max;
    s.identity = BeamOperator::identity(n_max);
    for (auto &op : s.standard) {
        op = BeamOperator(n_max);
    }
    for (int n = 0; n <= n_max; ++n) {
        const Eigen::MatrixXcd up = hop_h_from_v(n);
        const Eigen::MatrixXcd down = up.adjoint();
        s.standard[stokes_slot(StokesIndex::diagonal)].sector(n) = up + down;
        s.standard[stokes_slot(StokesIndex::circular)].sector(n) = -kI * (up - down);
        auto &linear = s.standard[stokes_slot(StokesIndex::linear)].sector(n);
        for (int h = 0; h <= n; ++h) {
            linear(h, h) = 2.0 * h - n;
        }
    }
    for (std::size_t k = 0; k < 3; ++k) {
        s.normalized[k] = BeamOperator(n_max);
        for (int n = 1; n <= n_max; ++n) {
            s.normalized[k].sector(n) = s.standard[k].sector(n) / static_cast<double>(n);
        }
        s.standard_sq[k] = s.standard[k] * s.standard[k];
        s.normalized_sq[k] = s.normalized[k] * s.normalized[k];
    }
    s.number = BeamOperator::diagonal(n_max, [](int n, int) { return static_cast<double>(n); });
    s.number_sq = BeamOperator::diagonal(n_max, [](int n, int) { return static_cast<double>(n) * n; });
    s.vacuum_projector = BeamOperator::diagonal(n_max, [](int n, int) { return n > 0 ? 1.0 : 0.0; });
    s.pi_inv_n_pi = BeamOperator::diagonal(n_max, [](int n, int) { return n > 0 ? 1.0 / n : 0.0; });
    return s;
}

std::shared_ptr<const LocalStokes> local_stokes(int n_max) {
    static std::mutex mutex;
    static std::map<int, std::shared_ptr<const LocalStokes>> cache;
    std::lock_guard lock(mutex);
    auto &slot = cache[n_max];
    if (!slot) {
        slot = std::make_shared<const LocalStokes>(build_local_stokes(n_max));
    }
    return slot;
}

BeamOperator polarization_rotation(StokesIndex axis, double angle, int n_max) {
    const auto stokes = local_stokes(n_max);
    BeamOperator out(n_max);
    for (int n = 0; n <= n_max; ++n) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(stokes->standard[stokes_slot(axis)].sector(n));
        Eigen::VectorXcd phases(n + 1);
        for (int k = 0; k <= n; ++k) {
            phases(k) = std::exp(-kI * (angle / 2.0) * solver.eigenvalues()(k));
        }
        out.sector(n) = solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
    }
    return out;
}

IdentityReport verify_identities(const Truncation &truncation) {
    IdentityReport report;
    report.n_max = truncation.n_max_per_beam;
    const auto identity = SparseOperator::identity(truncation);
    for (Beam beam : kBothBeams) {
        const StokesSet set = stokes_set(beam, truncation);

        SparseOperator sum_theta_sq = SparseOperator::zero(truncation);
        SparseOperator sum_s_sq = SparseOperator::zero(truncation);
        SparseOperator sum_s = SparseOperator::zero(truncation);
        for (std::size_t k = 0; k < 3; ++k) {
            sum_theta_sq = sum_theta_sq + compose(set.standard[k], set.standard[k]);
            sum_s_sq = sum_s_sq + compose(set.normalized[k], set.normalized[k]);
            sum_s = sum_s + set.normalized[k];
        }
        const auto n_n_plus_2 = compose(set.number, set.number + 2.0 * identity);
        const auto normalized_rhs = set.vacuum_projector + 2.0 * set.pi_inv_n_pi;

        report.standard_deviation = std::max(report.standard_deviation, sum_theta_sq.max_abs_deviation(n_n_plus_2));
        report.normalized_deviation = std::max(report.normalized_deviation, sum_s_sq.max_abs_deviation(normalized_rhs));
        report.unsquared_normalized_deviation =
            std::max(report.unsquared_normalized_deviation, sum_s.max_abs_deviation(normalized_rhs));
    }
    return report;
}

}  // namespace stokeslab
