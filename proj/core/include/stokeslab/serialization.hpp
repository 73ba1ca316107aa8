#pragma once

#include <iosfwd>
#include <string>

#include "stokeslab/quantum_state.hpp"
#include "stokeslab/sparse_operator.hpp"

namespace stokeslab {

// Text format: one header line
//   # stokeslab <operator|pure|mixed> nmax=<n> dim=<D> [hermitian=<0|1>]
// followed by `row,col,re,im` lines for every stored nonzero, doubles printed
// with 17 significant digits. Pure states use col = 0. Mixed states write the
// block-diagonal part (see QuantumState).

/// Formats a double with 17 significant digits and '.' as decimal separator.
std::string format_double(double value);

void write_operator_csv(std::ostream &out, const SparseOperator &op);
SparseOperator read_operator_csv(std::istream &in);

void write_state_csv(std::ostream &out, const QuantumState &state);
QuantumState read_state_csv(std::istream &in);

}  // namespace stokeslab
