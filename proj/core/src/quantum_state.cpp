#include "stokeslab/quantum_state.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "stokeslab/error.hpp"

namespace stokeslab {

namespace {

using RowMajorMatrix = Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kNormTolerance = 1e-12;
constexpr double kHermitianImagTolerance = 1e-10;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::size_t block_count(const Truncation &t) {
    const auto n = static_cast<std::size_t>(t.n_max_per_beam) + 1;
    return n * n;
}

std::size_t full_index(const Truncation &t, int n_a, int h_a, int n_b, int h_b) {
    return beam_index(n_a, h_a) * t.beam_dim() + beam_index(n_b, h_b);
}

// Visits every (n_a, n_b) block of a full-space vector viewed as a beam matrix.
template <typename F>
void for_each_block(const Truncation &t, F &&f) {
    for (int na = 0; na <= t.n_max_per_beam; ++na) {
        for (int nb = 0; nb <= t.n_max_per_beam; ++nb) {
            f(na, nb);
        }
    }
}

Eigen::VectorXcd flatten_row_major(const RowMajorMatrix &m) {
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

void check_component_shape(const Truncation &t, const QuantumState::Component &c) {
    if (!(c.weight >= 0.0) || !std::isfinite(c.weight)) {
        throw std::invalid_argument("mixture weights must be finite and non-negative");
    }
    const auto dim = static_cast<Eigen::Index>(t.dim());
    std::visit(overloaded{
                   [&](const QuantumState::PureTerm &p) {
                       if (p.amplitudes.size() != dim) {
                           throw DimensionMismatch("pure component has the wrong dimension");
                       }
                   },
                   [&](const QuantumState::BlockTerm &b) {
                       if (b.blocks.size() != block_count(t)) {
                           throw DimensionMismatch("block component has the wrong number of blocks");
                       }
                       for_each_block(t, [&](int na, int nb) {
                           const auto &m = b.blocks[block_slot(na, nb, t.n_max_per_beam)];
                           const Eigen::Index d = (na + 1) * (nb + 1);
                           if (m.size() != 0 && (m.rows() != d || m.cols() != d)) {
                               throw DimensionMismatch("block component has a mis-shaped block");
                           }
                       });
                   },
                   [&](const QuantumState::DiagonalTerm &d) {
                       if (d.populations.size() != dim) {
                           throw DimensionMismatch("diagonal component has the wrong dimension");
                       }
                   },
               },
               c.body);
}

double component_trace(const QuantumState::Component &c) {
    return std::visit(overloaded{
                          [](const QuantumState::PureTerm &p) { return p.amplitudes.squaredNorm(); },
                          [](const QuantumState::BlockTerm &b) {
                              double tr = 0.0;
                              for (const auto &m : b.blocks) {
                                  if (m.size() != 0) {
                                      tr += m.trace().real();
                                  }
                              }
                              return tr;
                          },
                          [](const QuantumState::DiagonalTerm &d) { return d.populations.sum(); },
                      },
                      c.body);
}

void require_same_space(const QuantumState &state, const Truncation &t) {
    if (!(state.truncation() == t)) {
        throw DimensionMismatch("state and operator built for incompatible truncations (n_max " +
                                std::to_string(state.truncation().n_max_per_beam) + " vs " +
                                std::to_string(t.n_max_per_beam) + ")");
    }
}

}  // namespace

QuantumState::QuantumState(Truncation truncation, std::vector<Component> components, double tail_mass)
    : truncation_(truncation), components_(std::move(components)), tail_mass_(tail_mass) {
}

QuantumState QuantumState::pure(Truncation truncation, Eigen::VectorXcd amplitudes, double tail_mass) {
    if (amplitudes.size() != static_cast<Eigen::Index>(truncation.dim())) {
        throw DimensionMismatch("state vector length does not match the truncation");
    }
    if (std::abs(amplitudes.norm() - 1.0) > kNormTolerance) {
        throw std::invalid_argument("pure state vector is not normalized");
    }
    std::vector<Component> components;
    components.push_back({1.0, PureTerm{std::move(amplitudes)}});
    return {truncation, std::move(components), tail_mass};
}

QuantumState QuantumState::mixture(Truncation truncation, std::vector<Component> components, double tail_mass) {
    if (components.empty()) {
        throw std::invalid_argument("mixture needs at least one component");
    }
    for (const auto &c : components) {
        check_component_shape(truncation, c);
    }
    return {truncation, std::move(components), tail_mass};
}

QuantumState QuantumState::from_density(Truncation truncation, const Eigen::MatrixXcd &rho, double tail_mass) {
    const auto dim = static_cast<Eigen::Index>(truncation.dim());
    if (rho.rows() != dim || rho.cols() != dim) {
        throw DimensionMismatch("density matrix shape does not match the truncation");
    }
    BlockTerm term;
    term.blocks.resize(block_count(truncation));
    for_each_block(truncation, [&](int na, int nb) {
        const Eigen::Index d = (na + 1) * (nb + 1);
        Eigen::MatrixXcd block(d, d);
        for (int ha = 0; ha <= na; ++ha) {
            for (int hb = 0; hb <= nb; ++hb) {
                const auto r = static_cast<Eigen::Index>(full_index(truncation, na, ha, nb, hb));
                for (int ka = 0; ka <= na; ++ka) {
                    for (int kb = 0; kb <= nb; ++kb) {
                        const auto c = static_cast<Eigen::Index>(full_index(truncation, na, ka, nb, kb));
                        block(ha * (nb + 1) + hb, ka * (nb + 1) + kb) = rho(r, c);
                    }
                }
            }
        }
        if (block.cwiseAbs().maxCoeff() > 0.0) {
            term.blocks[block_slot(na, nb, truncation.n_max_per_beam)] = std::move(block);
        }
    });
    std::vector<Component> components;
    components.push_back({1.0, std::move(term)});
    return mixture(truncation, std::move(components), tail_mass);
}

QuantumState::Kind QuantumState::kind() const {
    if (components_.size() == 1 && components_.front().weight == 1.0 &&
        std::holds_alternative<PureTerm>(components_.front().body)) {
        return Kind::pure;
    }
    return Kind::mixed;
}

const Eigen::VectorXcd &QuantumState::pure_vector() const {
    if (kind() != Kind::pure) {
        throw std::logic_error("pure_vector() called on a mixed state");
    }
    return std::get<PureTerm>(components_.front().body).amplitudes;
}

Eigen::MatrixXcd QuantumState::density_matrix() const {
    if (dimension() > kDenseLimit) {
        throw std::length_error("density_matrix(): dimension " + std::to_string(dimension()) +
                                " exceeds the dense limit");
    }
    const auto dim = static_cast<Eigen::Index>(dimension());
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dim, dim);
    const Truncation &t = truncation_;
    for (const auto &c : components_) {
        std::visit(overloaded{
                       [&](const PureTerm &p) { rho += c.weight * p.amplitudes * p.amplitudes.adjoint(); },
                       [&](const BlockTerm &b) {
                           for_each_block(t, [&](int na, int nb) {
                               const auto &m = b.blocks[block_slot(na, nb, t.n_max_per_beam)];
                               if (m.size() == 0) {
                                   return;
                               }
                               for (int ha = 0; ha <= na; ++ha) {
                                   for (int hb = 0; hb <= nb; ++hb) {
                                       const auto r = static_cast<Eigen::Index>(full_index(t, na, ha, nb, hb));
                                       for (int ka = 0; ka <= na; ++ka) {
                                           for (int kb = 0; kb <= nb; ++kb) {
                                               const auto col =
                                                   static_cast<Eigen::Index>(full_index(t, na, ka, nb, kb));
                                               rho(r, col) += c.weight * m(ha * (nb + 1) + hb, ka * (nb + 1) + kb);
                                           }
                                       }
                                   }
                               }
                           });
                       },
                       [&](const DiagonalTerm &d) { rho.diagonal() += c.weight * d.populations.cast<std::complex<double>>(); },
                   },
                   c.body);
    }
    return rho;
}

std::vector<Eigen::MatrixXcd> QuantumState::block_density() const {
    const Truncation &t = truncation_;
    const int n_max = t.n_max_per_beam;
    std::vector<Eigen::MatrixXcd> out(block_count(t));
    auto accumulate = [&](std::size_t slot, int d, const auto &contribution) {
        if (out[slot].size() == 0) {
            out[slot] = Eigen::MatrixXcd::Zero(d, d);
        }
        out[slot] += contribution;
    };
    for (const auto &c : components_) {
        std::visit(overloaded{
                       [&](const PureTerm &p) {
                           auto blocks = dephase_pure(p.amplitudes, t);
                           for (std::size_t s = 0; s < blocks.size(); ++s) {
                               if (blocks[s].size() != 0) {
                                   accumulate(s, static_cast<int>(blocks[s].rows()), c.weight * blocks[s]);
                               }
                           }
                       },
                       [&](const BlockTerm &b) {
                           for (std::size_t s = 0; s < b.blocks.size(); ++s) {
                               if (b.blocks[s].size() != 0) {
                                   accumulate(s, static_cast<int>(b.blocks[s].rows()), c.weight * b.blocks[s]);
                               }
                           }
                       },
                       [&](const DiagonalTerm &d) {
                           for_each_block(t, [&](int na, int nb) {
                               const int dim = (na + 1) * (nb + 1);
                               Eigen::VectorXcd diag(dim);
                               for (int ha = 0; ha <= na; ++ha) {
                                   for (int hb = 0; hb <= nb; ++hb) {
                                       diag(ha * (nb + 1) + hb) =
                                           d.populations(static_cast<Eigen::Index>(full_index(t, na, ha, nb, hb)));
                                   }
                               }
                               if (diag.cwiseAbs().maxCoeff() > 0.0) {
                                   accumulate(block_slot(na, nb, n_max), dim,
                                              Eigen::MatrixXcd(c.weight * diag.asDiagonal()));
                               }
                           });
                       },
                   },
                   c.body);
    }
    return out;
}

double QuantumState::trace() const {
    double tr = 0.0;
    for (const auto &c : components_) {
        tr += c.weight * component_trace(c);
    }
    return tr;
}

BeamMatrixMap as_beam_matrix(const Eigen::VectorXcd &amplitudes, const Truncation &truncation) {
    const auto beam_dim = static_cast<Eigen::Index>(truncation.beam_dim());
    return BeamMatrixMap(amplitudes.data(), beam_dim, beam_dim);
}

std::vector<Eigen::MatrixXcd> dephase_pure(const Eigen::VectorXcd &amplitudes, const Truncation &truncation) {
    std::vector<Eigen::MatrixXcd> out(block_count(truncation));
    const auto psi = as_beam_matrix(amplitudes, truncation);
    for_each_block(truncation, [&](int na, int nb) {
        RowMajorMatrix block = psi.block(static_cast<Eigen::Index>(sector_offset(na)),
                                         static_cast<Eigen::Index>(sector_offset(nb)), na + 1, nb + 1);
        if (block.squaredNorm() == 0.0) {
            return;
        }
        const Eigen::VectorXcd v = flatten_row_major(block);
        out[block_slot(na, nb, truncation.n_max_per_beam)] = v * v.adjoint();
    });
    return out;
}

StateCheck check_invariants(const QuantumState &state) {
    StateCheck check;
    check.trace_error = std::abs(state.trace() - 1.0);
    double min_bound = 0.0;
    for (const auto &c : state.components()) {
        std::visit(overloaded{
                       [&](const QuantumState::PureTerm &) {},
                       [&](const QuantumState::BlockTerm &b) {
                           for (const auto &m : b.blocks) {
                               if (m.size() == 0) {
                                   continue;
                               }
                               check.hermiticity_error =
                                   std::max(check.hermiticity_error, (m - m.adjoint()).cwiseAbs().maxCoeff());
                               Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(
                                   (m + m.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
                               min_bound += c.weight * std::min(0.0, solver.eigenvalues().minCoeff());
                           }
                       },
                       [&](const QuantumState::DiagonalTerm &d) {
                           min_bound += c.weight * std::min(0.0, d.populations.minCoeff());
                       },
                   },
                   c.body);
    }
    if (state.dimension() <= QuantumState::kDenseLimit) {
        const Eigen::MatrixXcd rho = state.density_matrix();
        check.hermiticity_error = std::max(check.hermiticity_error, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver((rho + rho.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
        check.min_eigenvalue = solver.eigenvalues().minCoeff();
        check.min_eigenvalue_exact = true;
    } else {
        check.min_eigenvalue = min_bound;
        check.min_eigenvalue_exact = false;
    }
    return check;
}

std::complex<double> expectation(const QuantumState &state, const SparseOperator &op) {
    require_same_space(state, op.truncation());
    const Truncation &t = state.truncation();
    const auto &m = op.matrix();
    const std::size_t beam_dim = t.beam_dim();
    std::complex<double> value(0.0, 0.0);

    for (const auto &c : state.components()) {
        std::visit(overloaded{
                       [&](const QuantumState::PureTerm &p) {
                           const Eigen::VectorXcd image = m * p.amplitudes;
                           value += c.weight * p.amplitudes.dot(image);
                       },
                       [&](const QuantumState::BlockTerm &b) {
                           // Tr(O rho) = sum_{r,c} O_rc rho_cr, restricted to pairs in the same block.
                           for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
                               const auto la = beam_label(static_cast<std::size_t>(r) / beam_dim);
                               const auto lb = beam_label(static_cast<std::size_t>(r) % beam_dim);
                               const auto &block = b.blocks[block_slot(la.n_total, lb.n_total, t.n_max_per_beam)];
                               if (block.size() == 0) {
                                   continue;
                               }
                               const int stride = lb.n_total + 1;
                               const Eigen::Index local_r = la.n_h * stride + lb.n_h;
                               for (SparseOperator::Matrix::InnerIterator it(m, r); it; ++it) {
                                   const auto ca = beam_label(static_cast<std::size_t>(it.col()) / beam_dim);
                                   const auto cb = beam_label(static_cast<std::size_t>(it.col()) % beam_dim);
                                   if (ca.n_total != la.n_total || cb.n_total != lb.n_total) {
                                       continue;
                                   }
                                   const Eigen::Index local_c = ca.n_h * stride + cb.n_h;
                                   value += c.weight * it.value() * block(local_c, local_r);
                               }
                           }
                       },
                       [&](const QuantumState::DiagonalTerm &d) {
                           value += c.weight * (m.diagonal().array() * d.populations.cast<std::complex<double>>().array()).sum();
                       },
                   },
                   c.body);
    }

    if (op.hermitian()) {
        if (std::abs(value.imag()) > kHermitianImagTolerance) {
            throw NumericalGuardError("expectation of a Hermitian operator has imaginary part " +
                                      std::to_string(value.imag()));
        }
        value = {value.real(), 0.0};
    }
    return value;
}

std::complex<double> expectation(const QuantumState &state, const BeamOperator &on_a, const BeamOperator &on_b) {
    const Truncation &t = state.truncation();
    if (on_a.n_max() != t.n_max_per_beam || on_b.n_max() != t.n_max_per_beam) {
        throw DimensionMismatch("beam operators and state built for incompatible truncations");
    }
    const int n_max = t.n_max_per_beam;
    std::complex<double> value(0.0, 0.0);

    for (const auto &c : state.components()) {
        std::visit(overloaded{
                       [&](const QuantumState::PureTerm &p) {
                           const auto psi = as_beam_matrix(p.amplitudes, t);
                           for_each_block(t, [&](int na, int nb) {
                               const auto block = psi.block(static_cast<Eigen::Index>(sector_offset(na)),
                                                            static_cast<Eigen::Index>(sector_offset(nb)), na + 1,
                                                            nb + 1);
                               if (block.squaredNorm() == 0.0) {
                                   return;
                               }
                               Eigen::MatrixXcd image = block;
                               if (!on_a.is_identity()) {
                                   image = on_a.sector(na) * image;
                               }
                               if (!on_b.is_identity()) {
                                   image = image * on_b.sector(nb).transpose();
                               }
                               value += c.weight * (block.conjugate().cwiseProduct(image)).sum();
                           });
                       },
                       [&](const QuantumState::BlockTerm &b) {
                           for_each_block(t, [&](int na, int nb) {
                               const auto &rho = b.blocks[block_slot(na, nb, n_max)];
                               if (rho.size() == 0) {
                                   return;
                               }
                               const auto &x = on_a.sector(na);
                               const auto &y = on_b.sector(nb);
                               const int db = nb + 1;
                               // sum X[a,a'] Y[b,b'] rho[(a',b'),(a,b)]
                               std::complex<double> acc(0.0, 0.0);
                               for (int a = 0; a <= na; ++a) {
                                   for (int ap = 0; ap <= na; ++ap) {
                                       const auto xv = x(a, ap);
                                       if (xv == std::complex<double>(0.0, 0.0)) {
                                           continue;
                                       }
                                       for (int bb = 0; bb <= nb; ++bb) {
                                           for (int bp = 0; bp <= nb; ++bp) {
                                               acc += xv * y(bb, bp) * rho(ap * db + bp, a * db + bb);
                                           }
                                       }
                                   }
                               }
                               value += c.weight * acc;
                           });
                       },
                       [&](const QuantumState::DiagonalTerm &d) {
                           const Eigen::VectorXcd dx = on_a.diagonal_entries();
                           const Eigen::VectorXcd dy = on_b.diagonal_entries();
                           const auto beam_dim = static_cast<Eigen::Index>(t.beam_dim());
                           const Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
                               pops(d.populations.data(), beam_dim, beam_dim);
                           const Eigen::VectorXcd weighted = pops.cast<std::complex<double>>() * dy;
                           value += c.weight * dx.cwiseProduct(weighted).sum();
                       },
                   },
                   c.body);
    }
    return value;
}

double fidelity(const QuantumState &reference, const QuantumState &other) {
    if (!(reference.truncation() == other.truncation())) {
        throw DimensionMismatch("fidelity between states of different truncations");
    }
    const Eigen::VectorXcd &psi = reference.pure_vector();
    const Truncation &t = reference.truncation();
    double value = 0.0;
    for (const auto &c : other.components()) {
        std::visit(overloaded{
                       [&](const QuantumState::PureTerm &p) { value += c.weight * std::norm(psi.dot(p.amplitudes)); },
                       [&](const QuantumState::BlockTerm &b) {
                           const auto view = as_beam_matrix(psi, t);
                           for_each_block(t, [&](int na, int nb) {
                               const auto &rho = b.blocks[block_slot(na, nb, t.n_max_per_beam)];
                               if (rho.size() == 0) {
                                   return;
                               }
                               RowMajorMatrix block = view.block(static_cast<Eigen::Index>(sector_offset(na)),
                                                                 static_cast<Eigen::Index>(sector_offset(nb)),
                                                                 na + 1, nb + 1);
                               const Eigen::VectorXcd v = flatten_row_major(block);
                               value += c.weight * v.dot(rho * v).real();
                           });
                       },
                       [&](const QuantumState::DiagonalTerm &d) {
                           value += c.weight * psi.cwiseAbs2().dot(d.populations);
                       },
                   },
                   c.body);
    }
    return value;
}

double purity(const QuantumState &state) {
    const Eigen::MatrixXcd rho = state.density_matrix();
    return (rho * rho).trace().real();
}

}  // namespace stokeslab
