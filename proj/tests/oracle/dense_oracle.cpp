#include "dense_oracle.hpp"

#include <cmath>
#include <unsupported/Eigen/KroneckerProduct>

#include "stokeslab/basis.hpp"

namespace oracle {

namespace {

const std::complex<double> kI(0.0, 1.0);

Mat single_mode_lower(int cutoff) {
    Mat a = Mat::Zero(cutoff + 1, cutoff + 1);
    for (int n = 1; n <= cutoff; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return a;
}

Mat on_mode(const Space &s, Mode mode, const Mat &m) {
    const Mat id = Mat::Identity(s.mode_dim(), s.mode_dim());
    std::array<Mat, 4> factors{id, id, id, id};
    factors[mode] = m;
    Mat out = Eigen::kroneckerProduct(factors[0], factors[1]).eval();
    out = Eigen::kroneckerProduct(out, factors[2]).eval();
    return Eigen::kroneckerProduct(out, factors[3]).eval();
}

Mode h_of(int beam) {
    return beam == 0 ? AH : BH;
}
Mode v_of(int beam) {
    return beam == 0 ? AV : BV;
}

// Beam photon number of every oracle basis state.
Eigen::VectorXd beam_numbers(const Space &s, int beam) {
    return number(s, beam).diagonal().real();
}

double binomial(int n, int k) {
    return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)));
}

}  // namespace

Mat lower(const Space &s, Mode mode) {
    return on_mode(s, mode, single_mode_lower(s.cutoff));
}

Mat raise(const Space &s, Mode mode) {
    return lower(s, mode).adjoint();
}

Mat number(const Space &s, int beam) {
    const Mat ah = lower(s, h_of(beam));
    const Mat av = lower(s, v_of(beam));
    return ah.adjoint() * ah + av.adjoint() * av;
}

Mat theta(const Space &s, int beam, int i) {
    const Mat h = lower(s, h_of(beam));
    const Mat v = lower(s, v_of(beam));
    switch (i) {
        case 1:
            return h.adjoint() * v + v.adjoint() * h;
        case 2:
            return -kI * (h.adjoint() * v - v.adjoint() * h);
        default:
            return h.adjoint() * h - v.adjoint() * v;
    }
}

Mat vacuum_projector(const Space &s, int beam) {
    const Eigen::VectorXd n = beam_numbers(s, beam);
    Mat p = Mat::Zero(s.dim(), s.dim());
    for (Eigen::Index k = 0; k < s.dim(); ++k) {
        p(k, k) = n(k) > 0.5 ? 1.0 : 0.0;
    }
    return p;
}

Mat inverse_number(const Space &s, int beam) {
    const Eigen::VectorXd n = beam_numbers(s, beam);
    Mat p = Mat::Zero(s.dim(), s.dim());
    for (Eigen::Index k = 0; k < s.dim(); ++k) {
        p(k, k) = n(k) > 0.5 ? 1.0 / n(k) : 0.0;
    }
    return p;
}

Mat normalized(const Space &s, int beam, int i) {
    const Mat pi = vacuum_projector(s, beam);
    return pi * theta(s, beam, i) * inverse_number(s, beam) * pi;
}

Vec vacuum(const Space &s) {
    Vec v = Vec::Zero(s.dim());
    v(0) = 1.0;
    return v;
}

Vec singlet(const Space &s, int n) {
    const Mat pair = raise(s, AH) * raise(s, BV) - raise(s, AV) * raise(s, BH);
    Vec v = vacuum(s);
    for (int k = 0; k < n; ++k) {
        v = pair * v;
    }
    return v / v.norm();
}

Vec bsv(const Space &s, double gain, int n_max) {
    const double t = std::tanh(gain);
    Vec v = Vec::Zero(s.dim());
    for (int m = 0; m <= n_max; ++m) {
        for (int k = 0; m + k <= n_max; ++k) {
            const double sign = k % 2 == 0 ? 1.0 : -1.0;
            v(s.index(m, k, k, m)) = sign * std::pow(t, m + k);
        }
    }
    return v / v.norm();
}

Eigen::Index map_index(const Space &s, const stokeslab::Truncation &t, std::size_t index) {
    const stokeslab::OccupationState o = stokeslab::basis_state(t, index);
    return s.index(o.n_ah, o.n_av, o.n_bh, o.n_bv);
}

Mat embed(const Space &s, const stokeslab::QuantumState &state) {
    const Mat rho = state.density_matrix();
    const auto &t = state.truncation();
    Mat out = Mat::Zero(s.dim(), s.dim());
    for (Eigen::Index r = 0; r < rho.rows(); ++r) {
        for (Eigen::Index c = 0; c < rho.cols(); ++c) {
            out(map_index(s, t, static_cast<std::size_t>(r)), map_index(s, t, static_cast<std::size_t>(c))) = rho(r, c);
        }
    }
    return out;
}

Mat loss(const Space &s, const Mat &rho, double eta_a, double eta_b) {
    Mat out = rho;
    for (Mode mode : {AH, AV, BH, BV}) {
        const double eta = mode == AH || mode == AV ? eta_a : eta_b;
        Mat next = Mat::Zero(s.dim(), s.dim());
        for (int k = 0; k <= s.cutoff; ++k) {
            Mat e = Mat::Zero(s.mode_dim(), s.mode_dim());
            for (int n = k; n <= s.cutoff; ++n) {
                e(n - k, n) = std::sqrt(binomial(n, k) * std::pow(eta, n - k) * std::pow(1.0 - eta, k));
            }
            const Mat kraus = on_mode(s, mode, e);
            next += kraus * out * kraus.adjoint();
        }
        out = next;
    }
    return out;
}

double expect(const Mat &rho, const Mat &op) {
    return (rho * op).trace().real();
}

std::array<Value, 10> witnesses(const Space &s, const Mat &rho) {
    // For each family: ops[beam][i], weight W, shot-noise term.
    struct Family {
        std::array<std::array<Mat, 3>, 2> ops;
        std::array<Mat, 2> weight;
        std::array<Mat, 2> shot;
    };
    auto make = [&](bool standard) {
        Family f;
        for (int beam = 0; beam < 2; ++beam) {
            for (int i = 1; i <= 3; ++i) {
                f.ops[beam][i - 1] = standard ? theta(s, beam, i) : normalized(s, beam, i);
            }
            f.weight[beam] = standard ? number(s, beam) : vacuum_projector(s, beam);
            f.shot[beam] = standard ? number(s, beam) : inverse_number(s, beam);
        }
        return f;
    };

    std::array<Value, 10> out{};
    for (int fam = 0; fam < 2; ++fam) {
        const Family f = make(fam == 0);
        double simon_lhs = 0.0;
        double var_lhs = 0.0;
        double cauchy_lhs = 0.0;
        std::array<double, 2> first_sq{0.0, 0.0};
        for (int i = 0; i < 3; ++i) {
            const Mat total = f.ops[0][i] + f.ops[1][i];
            const double second = expect(rho, total * total);
            const double mean = expect(rho, total);
            simon_lhs += second;
            var_lhs += second - mean * mean;
            cauchy_lhs += std::abs(expect(rho, f.ops[0][i] * f.ops[1][i]));
            for (int beam = 0; beam < 2; ++beam) {
                const double m = expect(rho, f.ops[beam][i]);
                first_sq[beam] += m * m;
            }
        }
        const double epr = 2.0 * (expect(rho, f.shot[0]) + expect(rho, f.shot[1]));
        const double imbalance = expect(rho, f.weight[0] - f.weight[1]);
        const double cauchy_rhs = expect(rho, f.weight[0] * f.weight[1]);
        std::array<double, 2> spread{};
        for (int beam = 0; beam < 2; ++beam) {
            spread[beam] =
                std::sqrt(std::max(0.0, expect(rho, f.weight[beam] * f.weight[beam]) - first_sq[beam]));
        }
        const double extra = (spread[0] - spread[1]) * (spread[0] - spread[1]);

        out[0 + fam] = {simon_lhs, epr};
        out[2 + fam] = {simon_lhs, epr + imbalance * imbalance};
        out[4 + fam] = {cauchy_lhs, cauchy_rhs};
        out[6 + fam] = {var_lhs, epr};
        out[8 + fam] = {var_lhs, epr + extra};
    }
    return out;
}

Eigen::VectorXd count_distribution(const Space &s, const Mat &rho, int i) {
    const int base = 2 * s.cutoff + 1;
    std::array<Mat, 4> counters;
    for (int beam = 0; beam < 2; ++beam) {
        const Mat n = number(s, beam);
        const Mat th = theta(s, beam, i);
        counters[2 * beam] = 0.5 * (n + th);
        counters[2 * beam + 1] = 0.5 * (n - th);
    }
    const Mat key = counters[0] + double(base) * counters[1] + double(base * base) * counters[2] +
                    double(base * base * base) * counters[3];
    Eigen::SelfAdjointEigenSolver<Mat> solver(key);

    Eigen::VectorXd probs = Eigen::VectorXd::Zero(s.dim());
    for (Eigen::Index k = 0; k < s.dim(); ++k) {
        auto code = static_cast<long>(std::lround(solver.eigenvalues()(k)));
        std::array<int, 4> digits{};
        for (int &d : digits) {
            d = static_cast<int>(code % base);
            code /= base;
        }
        const Vec v = solver.eigenvectors().col(k);
        const double p = (v.adjoint() * rho * v).value().real();
        if (digits[0] > s.cutoff || digits[1] > s.cutoff || digits[2] > s.cutoff || digits[3] > s.cutoff) {
            continue;  // outside the embedded support; p is zero there
        }
        probs(s.index(digits[0], digits[1], digits[2], digits[3])) += p;
    }
    return probs;
}

}  // namespace oracle
