#include "stokeslab/serialization.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "stokeslab/error.hpp"

namespace stokeslab {

namespace {

struct Header {
    std::string kind;
    int n_max = -1;
    std::size_t dim = 0;
    bool hermitian = false;
};

Header read_header(std::istream &in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw SpecError("empty input", "<eof>");
    }
    std::istringstream words(line);
    std::string hash;
    std::string tag;
    Header h;
    words >> hash >> tag >> h.kind;
    if (hash != "#" || tag != "stokeslab") {
        throw SpecError("missing '# stokeslab' header", line);
    }
    std::string field;
    while (words >> field) {
        const auto eq = field.find('=');
        if (eq == std::string::npos) {
            throw SpecError("malformed header field", field);
        }
        const std::string key = field.substr(0, eq);
        const std::string value = field.substr(eq + 1);
        if (key == "nmax") {
            h.n_max = std::stoi(value);
        } else if (key == "dim") {
            h.dim = std::stoull(value);
        } else if (key == "hermitian") {
            h.hermitian = value == "1";
        } else {
            throw SpecError("unknown header field", field);
        }
    }
    if (h.n_max < 0) {
        throw SpecError("header lacks nmax", line);
    }
    if (Truncation{h.n_max}.dim() != h.dim) {
        throw SpecError("header dim does not match nmax", line);
    }
    return h;
}

struct Entry {
    std::size_t row;
    std::size_t col;
    std::complex<double> value;
};

std::vector<Entry> read_entries(std::istream &in, std::size_t dim) {
    std::vector<Entry> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        unsigned long long r = 0;
        unsigned long long c = 0;
        double re = 0.0;
        double im = 0.0;
        if (std::sscanf(line.c_str(), "%llu,%llu,%lf,%lf", &r, &c, &re, &im) != 4) {
            throw SpecError("malformed entry line", line);
        }
        if (r >= dim || c >= dim) {
            throw SpecError("entry index out of range", line);
        }
        out.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(c), {re, im}});
    }
    return out;
}

void write_entry(std::ostream &out, std::size_t row, std::size_t col, std::complex<double> value) {
    out << row << ',' << col << ',' << format_double(value.real()) << ',' << format_double(value.imag()) << '\n';
}

}  // namespace

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_operator_csv(std::ostream &out, const SparseOperator &op) {
    out << "# stokeslab operator nmax=" << op.truncation().n_max_per_beam << " dim=" << op.dimension()
        << " hermitian=" << (op.hermitian() ? 1 : 0) << '\n';
    const auto &m = op.matrix();
    for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
        for (SparseOperator::Matrix::InnerIterator it(m, r); it; ++it) {
            write_entry(out, static_cast<std::size_t>(r), static_cast<std::size_t>(it.col()), it.value());
        }
    }
}

SparseOperator read_operator_csv(std::istream &in) {
    const Header h = read_header(in);
    if (h.kind != "operator") {
        throw SpecError("expected an operator file", h.kind);
    }
    const Truncation t{h.n_max};
    std::vector<Eigen::Triplet<std::complex<double>>> triplets;
    for (const auto &e : read_entries(in, h.dim)) {
        triplets.emplace_back(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col), e.value);
    }
    const auto dim = static_cast<Eigen::Index>(h.dim);
    SparseOperator::Matrix m(dim, dim);
    m.setFromTriplets(triplets.begin(), triplets.end());
    SparseOperator op(t, std::move(m));
    return h.hermitian ? op.as_hermitian() : op;
}

void write_state_csv(std::ostream &out, const QuantumState &state) {
    const Truncation &t = state.truncation();
    if (state.kind() == QuantumState::Kind::pure) {
        out << "# stokeslab pure nmax=" << t.n_max_per_beam << " dim=" << t.dim() << '\n';
        const auto &psi = state.pure_vector();
        for (Eigen::Index k = 0; k < psi.size(); ++k) {
            if (psi(k) != std::complex<double>(0.0, 0.0)) {
                write_entry(out, static_cast<std::size_t>(k), 0, psi(k));
            }
        }
        return;
    }
    out << "# stokeslab mixed nmax=" << t.n_max_per_beam << " dim=" << t.dim() << '\n';
    const auto blocks = state.block_density();
    const std::size_t beam_dim = t.beam_dim();
    for (int na = 0; na <= t.n_max_per_beam; ++na) {
        for (int nb = 0; nb <= t.n_max_per_beam; ++nb) {
            const auto &m = blocks[block_slot(na, nb, t.n_max_per_beam)];
            if (m.size() == 0) {
                continue;
            }
            auto full = [&](Eigen::Index local) {
                const auto ha = static_cast<int>(local / (nb + 1));
                const auto hb = static_cast<int>(local % (nb + 1));
                return beam_index(na, ha) * beam_dim + beam_index(nb, hb);
            };
            for (Eigen::Index r = 0; r < m.rows(); ++r) {
                for (Eigen::Index c = 0; c < m.cols(); ++c) {
                    if (m(r, c) != std::complex<double>(0.0, 0.0)) {
                        write_entry(out, full(r), full(c), m(r, c));
                    }
                }
            }
        }
    }
}

QuantumState read_state_csv(std::istream &in) {
    const Header h = read_header(in);
    const Truncation t{h.n_max};
    const auto entries = read_entries(in, h.dim);
    if (h.kind == "pure") {
        Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(h.dim));
        for (const auto &e : entries) {
            if (e.col != 0) {
                throw SpecError("pure state entries must have col = 0", std::to_string(e.col));
            }
            psi(static_cast<Eigen::Index>(e.row)) = e.value;
        }
        return QuantumState::pure(t, std::move(psi));
    }
    if (h.kind != "mixed") {
        throw SpecError("expected a pure or mixed state file", h.kind);
    }
    QuantumState::BlockTerm term;
    const auto n = static_cast<std::size_t>(h.n_max) + 1;
    term.blocks.resize(n * n);
    const std::size_t beam_dim = t.beam_dim();
    for (const auto &e : entries) {
        const auto ra = beam_label(e.row / beam_dim);
        const auto rb = beam_label(e.row % beam_dim);
        const auto ca = beam_label(e.col / beam_dim);
        const auto cb = beam_label(e.col % beam_dim);
        if (ra.n_total != ca.n_total || rb.n_total != cb.n_total) {
            throw SpecError("mixed state entry couples different photon-number blocks",
                            std::to_string(e.row) + "," + std::to_string(e.col));
        }
        auto &block = term.blocks[block_slot(ra.n_total, rb.n_total, h.n_max)];
        const int d = (ra.n_total + 1) * (rb.n_total + 1);
        if (block.size() == 0) {
            block = Eigen::MatrixXcd::Zero(d, d);
        }
        const int stride = rb.n_total + 1;
        block(ra.n_h * stride + rb.n_h, ca.n_h * stride + cb.n_h) = e.value;
    }
    std::vector<QuantumState::Component> components;
    components.push_back({1.0, std::move(term)});
    return QuantumState::mixture(t, std::move(components));
}

}  // namespace stokeslab
