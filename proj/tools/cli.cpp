#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "stokeslab/error.hpp"
#include "stokeslab/sampling.hpp"
#include "stokeslab/serialization.hpp"
#include "stokeslab/state_spec.hpp"
#include "stokeslab/states.hpp"
#include "stokeslab/stokes.hpp"
#include "stokeslab/witnesses.hpp"

namespace stokeslab::cli {

namespace {

constexpr int kIdentityNmaxLimit = 10;

class UsageError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

struct Options {
    std::string state;
    std::string nmax = "auto";
    std::string out;
    std::string sweep;
    std::string grid;
    std::string witnesses;
    std::string samples_out;
    std::string op;
    std::size_t shots = 100000;
    std::uint64_t seed = 0;
    int bootstrap = 200;
    int threads = 0;
    int identities_nmax = 8;
};

int parse_int(const std::string &text, const std::string &flag) {
    int value = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size()) {
        throw UsageError(flag + ": expected an integer, got '" + text + "'");
    }
    return value;
}

double parse_double(const std::string &text, const std::string &what) {
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size() || !std::isfinite(value)) {
        throw UsageError(what + ": expected a number, got '" + text + "'");
    }
    return value;
}

Truncation resolve_truncation(const std::string &nmax, const StateSpec &spec) {
    if (nmax == "auto") {
        return suggested_truncation(spec);
    }
    const int n = parse_int(nmax, "--nmax");
    if (n < 0) {
        throw UsageError("--nmax must be non-negative");
    }
    return Truncation{n};
}

std::vector<double> parse_grid(const std::string &text) {
    std::vector<std::string> parts;
    std::stringstream in(text);
    for (std::string part; std::getline(in, part, ':');) {
        parts.push_back(part);
    }
    if (parts.size() != 3) {
        throw UsageError("--grid must be start:stop:step, got '" + text + "'");
    }
    const double start = parse_double(parts[0], "--grid start");
    const double stop = parse_double(parts[1], "--grid stop");
    const double step = parse_double(parts[2], "--grid step");
    if (!(step > 0.0)) {
        throw UsageError("--grid step must be positive");
    }
    if (stop < start) {
        throw UsageError("--grid stop is below start");
    }
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> grid(count);
    for (std::size_t k = 0; k < count; ++k) {
        grid[k] = std::min(start + static_cast<double>(k) * step, stop);
    }
    return grid;
}

std::vector<WitnessId> parse_witnesses(const std::string &text) {
    if (text.empty() || text == "all") {
        return {kAllWitnesses.begin(), kAllWitnesses.end()};
    }
    std::vector<WitnessId> out;
    std::stringstream in(text);
    for (std::string name; std::getline(in, name, ',');) {
        const auto id = witness_from_name(name);
        if (!id) {
            throw UsageError("unknown witness '" + name + "'");
        }
        out.push_back(*id);
    }
    return out;
}

// Writes to --out if set, else to the provided stream.
class Sink {
   public:
    Sink(const std::string &path, std::ostream &fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) {
                throw UsageError("cannot open '" + path + "' for writing");
            }
            stream_ = &file_;
        }
    }
    std::ostream &operator*() {
        return *stream_;
    }

   private:
    std::ofstream file_;
    std::ostream *stream_;
};

void warn_on_tail(const QuantumState &state, std::ostream &err) {
    if (state.tail_mass() >= kBsvTailTolerance) {
        err << "warning: truncation n_max=" << state.truncation().n_max_per_beam << " discards probability "
            << format_double(state.tail_mass()) << '\n';
    }
}

int cmd_identities(const Options &o, std::ostream &out, std::ostream &err) {
    if (o.identities_nmax < 0 || o.identities_nmax > kIdentityNmaxLimit) {
        throw UsageError("identities: --nmax must be in [0, " + std::to_string(kIdentityNmaxLimit) + "]");
    }
    const IdentityReport r = verify_identities(Truncation{o.identities_nmax});
    Sink sink(o.out, out);
    *sink << "n_max,standard_deviation,normalized_deviation,unsquared_normalized_deviation,ok\n"
          << r.n_max << ',' << format_double(r.standard_deviation) << ',' << format_double(r.normalized_deviation)
          << ',' << format_double(r.unsquared_normalized_deviation) << ',' << (r.ok() ? 1 : 0) << '\n';
    if (!r.ok()) {
        err << "identities: deviation above " << format_double(IdentityReport::kTolerance) << '\n';
        return kExitNumerical;
    }
    return kExitOk;
}

int cmd_witness(const Options &o, std::ostream &out, std::ostream &err) {
    const StateSpec spec = parse_state_spec(o.state);
    const Truncation t = resolve_truncation(o.nmax, spec);
    const QuantumState state = build_state(spec, t);
    warn_on_tail(state, err);
    const auto reports = eval_all(state);
    Sink sink(o.out, out);
    *sink << witness_csv_header() << '\n';
    for (const auto &r : reports) {
        *sink << to_csv_row(r) << '\n';
    }
    for (const auto &v : dominance_violations(reports)) {
        err << "dominance: " << v << '\n';
    }
    return kExitOk;
}

struct WitnessSummary {
    std::optional<std::size_t> first;
    bool interval = true;
};

int cmd_sweep(const Options &o, std::ostream &out, std::ostream &err) {
    StateSpec spec = parse_state_spec(o.state);
    if (o.sweep.empty() || o.grid.empty()) {
        throw UsageError("sweep: --sweep and --grid are required");
    }
    if (!spec_parameter(spec, o.sweep)) {
        throw SpecError("swept parameter not present in the state spec", o.sweep);
    }
    const std::vector<double> grid = parse_grid(o.grid);
    const std::vector<WitnessId> ids = parse_witnesses(o.witnesses);

    // One truncation for the whole grid: with --nmax auto, the largest any point asks for.
    Truncation t{0};
    for (double value : grid) {
        StateSpec point = spec;
        set_spec_parameter(point, o.sweep, value);
        t.n_max_per_beam = std::max(t.n_max_per_beam, resolve_truncation(o.nmax, point).n_max_per_beam);
    }

    std::vector<std::vector<WitnessReport>> rows(grid.size());
    std::vector<std::exception_ptr> failures(grid.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < grid.size(); k = next++) {
            try {
                StateSpec point = spec;
                set_spec_parameter(point, o.sweep, grid[k]);
                rows[k] = eval_all(build_state(point, t));
            } catch (...) {
                failures[k] = std::current_exception();
            }
        }
    };
    unsigned threads = o.threads > 0 ? static_cast<unsigned>(o.threads) : std::thread::hardware_concurrency();
    threads = std::clamp(threads, 1u, static_cast<unsigned>(grid.size()));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto &th : pool) {
        th.join();
    }
    for (const auto &f : failures) {
        if (f) {
            std::rethrow_exception(f);
        }
    }

    Sink sink(o.out, out);
    *sink << o.sweep << ",id,lhs,rhs,margin,entangled\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
        for (WitnessId id : ids) {
            const auto &r = rows[k][static_cast<std::size_t>(id)];
            *sink << format_double(grid[k]) << ',' << to_csv_row(r) << '\n';
        }
    }

    std::map<WitnessId, WitnessSummary> summary;
    for (WitnessId id : kAllWitnesses) {
        WitnessSummary s;
        bool seen_gap = false;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const bool hit = rows[k][static_cast<std::size_t>(id)].entangled;
            if (hit && !s.first) {
                s.first = k;
            } else if (!hit && s.first) {
                seen_gap = true;
            } else if (hit && seen_gap) {
                s.interval = false;
            }
        }
        if (seen_gap) {
            s.interval = false;
        }
        summary[id] = s;
    }

    err << "# sweep " << spec.to_string() << " over " << o.sweep << " nmax=" << t.n_max_per_beam << '\n';
    err << "witness,p_star,interval_to_end\n";
    for (WitnessId id : ids) {
        const auto &s = summary[id];
        err << witness_name(id) << ',' << (s.first ? format_double(grid[*s.first]) : std::string("none")) << ','
            << (s.interval ? 1 : 0) << '\n';
    }

    bool contained = true;
    for (const auto &pair : kDominancePairs) {
        std::size_t failures_here = 0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (!dominance_violations({rows[k][static_cast<std::size_t>(pair.base)],
                                       rows[k][static_cast<std::size_t>(pair.improved)]})
                     .empty()) {
                ++failures_here;
            }
        }
        err << "containment " << witness_name(pair.improved) << " over " << witness_name(pair.base) << ": "
            << (failures_here == 0 ? "ok" : "FAILED at " + std::to_string(failures_here) + " points") << '\n';
        contained = contained && failures_here == 0;
    }
    return contained ? kExitOk : kExitNumerical;
}

int cmd_sample(const Options &o, std::ostream &out, std::ostream &err) {
    const StateSpec spec = parse_state_spec(o.state);
    const Truncation t = resolve_truncation(o.nmax, spec);
    const QuantumState state = build_state(spec, t);
    warn_on_tail(state, err);
    if (o.shots < kMinShotsPerBasis) {
        throw UsageError("--shots must be at least " + std::to_string(kMinShotsPerBasis));
    }
    if (o.bootstrap < 2) {
        throw UsageError("--bootstrap must be at least 2");
    }
    const BasisSamples samples = sample_all_bases(state, o.shots, o.seed);
    if (!o.samples_out.empty()) {
        Sink dump(o.samples_out, out);
        *dump << sample_csv_header() << '\n';
        for (StokesIndex i : kStokesIndices) {
            for (const auto &rec : samples[i]) {
                *dump << to_csv_row(rec) << '\n';
            }
        }
    }
    EstimateOptions options;
    options.bootstrap_resamples = o.bootstrap;
    options.bootstrap_seed = o.seed;
    const auto estimates = estimate_all(samples, options);
    Sink sink(o.out, out);
    *sink << estimate_csv_header() << '\n';
    for (const auto &e : estimates) {
        *sink << to_csv_row(e) << '\n';
    }
    err << "# sampled " << spec.to_string() << " nmax=" << t.n_max_per_beam << " shots/basis=" << o.shots
        << " seed=" << o.seed << '\n';
    return kExitOk;
}

SparseOperator named_operator(const std::string &name, const Truncation &t) {
    // <kind>:<beam>[:<index>] with kind in theta, s, n, pi, invn.
    std::vector<std::string> parts;
    std::stringstream in(name);
    for (std::string part; std::getline(in, part, ':');) {
        parts.push_back(part);
    }
    if (parts.size() < 2 || (parts[1] != "A" && parts[1] != "B")) {
        throw UsageError("operator must look like theta:A:3, s:B:1, n:A, pi:B or invn:A");
    }
    const Beam beam = parts[1] == "A" ? Beam::A : Beam::B;
    auto index = [&] {
        if (parts.size() != 3 || (parts[2] != "1" && parts[2] != "2" && parts[2] != "3")) {
            throw UsageError("operator '" + name + "' needs a Stokes index 1, 2 or 3");
        }
        return static_cast<StokesIndex>(parts[2][0] - '0');
    };
    if (parts[0] == "theta") {
        return stokes_standard(beam, index(), t);
    }
    if (parts[0] == "s") {
        return stokes_normalized(beam, index(), t);
    }
    if (parts.size() != 2) {
        throw UsageError("operator '" + name + "' takes no index");
    }
    if (parts[0] == "n") {
        return number_op(beam, t);
    }
    if (parts[0] == "pi") {
        return vacuum_projector(beam, t);
    }
    if (parts[0] == "invn") {
        return inverse_number(beam, t);
    }
    throw UsageError("unknown operator kind '" + parts[0] + "'");
}

int cmd_export(const Options &o, std::ostream &out, std::ostream &) {
    if (o.state.empty() == o.op.empty()) {
        throw UsageError("export: give exactly one of --state or --operator");
    }
    Sink sink(o.out, out);
    if (!o.state.empty()) {
        const StateSpec spec = parse_state_spec(o.state);
        write_state_csv(*sink, build_state(spec, resolve_truncation(o.nmax, spec)));
    } else {
        const int n = o.nmax == "auto" ? 2 : parse_int(o.nmax, "--nmax");
        if (n < 0) {
            throw UsageError("--nmax must be non-negative");
        }
        write_operator_csv(*sink, named_operator(o.op, Truncation{n}));
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Stokes-operator entanglement witnesses on truncated two-beam polarization states", "stokeslab"};
    app.require_subcommand(1);
    Options o;

    auto *identities = app.add_subcommand("identities", "Check the Stokes square identities on one beam space");
    identities->add_option("--nmax", o.identities_nmax, "Photons per beam (0..10)")->capture_default_str();
    identities->add_option("--out", o.out, "Write CSV here instead of stdout");

    auto *witness = app.add_subcommand("witness", "Evaluate all ten conditions exactly");
    witness->add_option("--state", o.state, "State spec, e.g. bsv(gain=0.8)+noise(p=0.2)")->required();
    witness->add_option("--nmax", o.nmax, "Photons per beam, or auto")->capture_default_str();
    witness->add_option("--out", o.out, "Write CSV here instead of stdout");

    auto *sweep = app.add_subcommand("sweep", "Evaluate the conditions over a parameter grid");
    sweep->add_option("--state", o.state, "State spec")->required();
    sweep->add_option("--sweep", o.sweep, "Swept parameter, e.g. noise.p")->required();
    sweep->add_option("--grid", o.grid, "start:stop:step")->required();
    sweep->add_option("--nmax", o.nmax, "Photons per beam, or auto")->capture_default_str();
    sweep->add_option("--witnesses", o.witnesses, "Comma-separated witness ids, or all")->capture_default_str();
    sweep->add_option("--threads", o.threads, "Worker threads (0 = hardware)")->capture_default_str();
    sweep->add_option("--out", o.out, "Write CSV here instead of stdout");

    auto *sample = app.add_subcommand("sample", "Simulate photon-counting runs and estimate the conditions");
    sample->add_option("--state", o.state, "State spec")->required();
    sample->add_option("--shots", o.shots, "Shots per polarization basis")->capture_default_str();
    sample->add_option("--seed", o.seed, "Seed for sampling and bootstrap")->capture_default_str();
    sample->add_option("--bootstrap", o.bootstrap, "Bootstrap resamples")->capture_default_str();
    sample->add_option("--nmax", o.nmax, "Photons per beam, or auto")->capture_default_str();
    sample->add_option("--samples-out", o.samples_out, "Also dump raw records to this file");
    sample->add_option("--out", o.out, "Write CSV here instead of stdout");

    auto *exporter = app.add_subcommand("export", "Write a state or an operator in the sparse CSV format");
    exporter->add_option("--state", o.state, "State spec");
    exporter->add_option("--operator", o.op, "theta:A:3, s:B:1, n:A, pi:B or invn:A");
    exporter->add_option("--nmax", o.nmax, "Photons per beam, or auto")->capture_default_str();
    exporter->add_option("--out", o.out, "Write CSV here instead of stdout");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*identities) {
            return cmd_identities(o, out, err);
        }
        if (*witness) {
            return cmd_witness(o, out, err);
        }
        if (*sweep) {
            return cmd_sweep(o, out, err);
        }
        if (*sample) {
            return cmd_sample(o, out, err);
        }
        return cmd_export(o, out, err);
    } catch (const NumericalGuardError &e) {
        err << "numerical guard: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace stokeslab::cli
