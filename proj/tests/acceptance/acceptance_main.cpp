// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "stokeslab/sampling.hpp"
#include "stokeslab/states.hpp"
#include "stokeslab/stokes.hpp"
#include "stokeslab/witnesses.hpp"

#ifndef STOKESLAB_CLI_PATH
#error "STOKESLAB_CLI_PATH must point at the stokeslab executable"
#endif

using namespace stokeslab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

// Every report produced here, for the dominance criterion.
std::vector<std::vector<WitnessReport>> g_evaluated;

std::vector<WitnessReport> evaluate(const QuantumState &state) {
    g_evaluated.push_back(eval_all(state));
    return g_evaluated.back();
}

const WitnessReport &pick(const std::vector<WitnessReport> &reports, WitnessId id) {
    return reports[static_cast<std::size_t>(id)];
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

Outcome identities() {
    const auto start = std::chrono::steady_clock::now();
    double worst_std = 0.0;
    double worst_norm = 0.0;
    for (int n = 0; n <= 8; ++n) {
        const IdentityReport r = verify_identities(Truncation{n});
        worst_std = std::max(worst_std, r.standard_deviation);
        worst_norm = std::max(worst_norm, r.normalized_deviation);
    }
    const double elapsed = seconds_since(start);
    return {worst_std < 1e-12 && worst_norm < 1e-12 && elapsed < 10.0,
            "n_max 0..8, max dev standard " + fmt(worst_std) + ", normalized " + fmt(worst_norm) + ", " +
                fmt(elapsed) + " s"};
}

Outcome epr_zero() {
    const int n_max = 8;
    const Truncation t{n_max};
    double worst = 0.0;
    for (int n = 1; n <= n_max; ++n) {
        const auto reports = evaluate(singlet_sector(n, t));
        worst = std::max({worst, std::abs(pick(reports, WitnessId::simon_std).lhs),
                          std::abs(pick(reports, WitnessId::simon_norm).lhs)});
    }
    return {worst < 1e-12, "singlet sectors 1..8, max |lhs| " + fmt(worst)};
}

Outcome singlet_values() {
    const auto reports = evaluate(singlet_sector(1, Truncation{1}));
    const auto &simon = pick(reports, WitnessId::simon_std);
    const auto &cauchy = pick(reports, WitnessId::cauchy_std);
    bool all = true;
    for (const auto &r : reports) {
        all = all && r.entangled;
    }
    const bool values = std::abs(simon.lhs) < 1e-12 && std::abs(simon.rhs - 4.0) < 1e-12 &&
                        std::abs(cauchy.lhs - 3.0) < 1e-12 && std::abs(cauchy.rhs - 1.0) < 1e-12;
    return {values && all, "SIMON_STD " + fmt(simon.lhs) + "/" + fmt(simon.rhs) + ", CAUCHY_STD " + fmt(cauchy.lhs) +
                               "/" + fmt(cauchy.rhs) + (all ? ", all ten flag" : ", not all flag")};
}

Outcome soundness() {
    const auto start = std::chrono::steady_clock::now();
    double worst = -1e300;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        const int terms = 1 + static_cast<int>(seed % 5);
        const Truncation t{1 + static_cast<int>((seed / 5) % 3)};
        for (const auto &r : evaluate(random_separable(seed, terms, t))) {
            worst = std::max(worst, r.margin);
        }
    }
    const double elapsed = seconds_since(start);
    return {worst <= kViolationTolerance && elapsed < 60.0,
            "1000 states, max margin " + fmt(worst) + ", " + fmt(elapsed) + " s"};
}

Outcome dominance() {
    double worst_gap = 1e300;
    std::size_t failures = 0;
    for (const auto &reports : g_evaluated) {
        failures += dominance_violations(reports).empty() ? 0 : 1;
        for (const auto &pair : kDominancePairs) {
            worst_gap = std::min(worst_gap, pick(reports, pair.improved).rhs - pick(reports, pair.base).rhs);
        }
    }
    return {failures == 0 && worst_gap >= -1e-12, std::to_string(g_evaluated.size()) +
                                                      " evaluated states, min rhs gap " + fmt(worst_gap) + ", " +
                                                      std::to_string(failures) + " failures"};
}

Outcome reduction() {
    double worst = 0.0;
    double worst_premise = 0.0;
    for (double gain : {0.3, 0.5, 0.8, 1.2}) {
        const auto state = bsv({gain, Truncation{bsv_min_truncation(gain)}});
        const auto moments = stokes_moments(state);
        for (StokesFamily f : {StokesFamily::standard, StokesFamily::normalized}) {
            for (std::size_t i = 0; i < 3; ++i) {
                worst_premise = std::max(worst_premise, std::abs(moments.family(f).mean[0][i] + moments.family(f).mean[1][i]));
            }
        }
        const auto reports = evaluate(state);
        worst = std::max({worst,
                          std::abs(pick(reports, WitnessId::var_std).lhs - pick(reports, WitnessId::simon_std).lhs),
                          std::abs(pick(reports, WitnessId::var_norm).lhs - pick(reports, WitnessId::simon_norm).lhs)});
    }
    return {worst < 1e-10 && worst_premise < 1e-12,
            "gains 0.3/0.5/0.8/1.2, max |VAR - SIMON| lhs " + fmt(worst) + ", max |<sum>| " + fmt(worst_premise)};
}

Outcome variance_oracle() {
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Truncation t{1 + static_cast<int>(seed % 3)};
        QuantumState state = vacuum(t);
        switch (seed % 4) {
            case 0:
                state = random_separable(seed, 2 + static_cast<int>(seed % 4), t);
                break;
            case 1:
                state = mix_white_noise(random_pure(seed, t), {0.1 + 0.008 * double(seed)});
                break;
            case 2:
                state = apply_loss(random_pure(seed, t), {0.2 + 0.007 * double(seed), 0.9});
                break;
            default:
                state = apply_loss(mix_white_noise(bsv({0.05 * double(seed % 20), t}), {0.6}), {0.7, 0.4});
                break;
        }
        evaluate(state);
        for (StokesFamily f : {StokesFamily::standard, StokesFamily::normalized}) {
            const auto v = lhs_crosscheck_variance(state, f);
            worst = std::max(worst, std::abs(v.direct - v.decomposed));
        }
    }
    return {worst < 1e-10, "100 mixed states, max path difference " + fmt(worst)};
}

Outcome noise_sweep(std::vector<std::string> &table) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    table.push_back("gain,n_max,tail_mass,witness,p_star");
    for (double gain : {0.3, 0.8, 1.2}) {
        const int n_max = bsv_min_truncation(gain);
        const QuantumState signal = bsv({gain, Truncation{n_max}});
        ok = ok && signal.tail_mass() < 1e-6;

        std::vector<std::vector<WitnessReport>> rows;
        for (int k = 0; k <= 100; ++k) {
            rows.push_back(evaluate(mix_white_noise(signal, {k / 100.0})));
        }
        std::array<int, 10> p_star_index{};
        for (std::size_t w = 0; w < 10; ++w) {
            int first = -1;
            bool interval = true;
            for (int k = 0; k <= 100; ++k) {
                const bool hit = rows[static_cast<std::size_t>(k)][w].entangled;
                if (hit && first < 0) {
                    first = k;
                }
                if (!hit && first >= 0) {
                    interval = false;
                }
            }
            ok = ok && interval && first >= 0;
            p_star_index[w] = first < 0 ? 101 : first;
            char p_star[16];
            std::snprintf(p_star, sizeof p_star, "%.2f", first / 100.0);
            table.push_back(fmt(gain) + "," + std::to_string(n_max) + "," + fmt(signal.tail_mass()) + "," +
                            std::string(witness_name(kAllWitnesses[w])) + "," +
                            (first < 0 ? std::string("none") : std::string(p_star)) +
                            (interval ? "" : " (not an interval)"));
        }
        for (const auto &pair : kDominancePairs) {
            ok = ok && p_star_index[static_cast<std::size_t>(pair.improved)] <=
                           p_star_index[static_cast<std::size_t>(pair.base)];
        }
    }
    const double elapsed = seconds_since(start);
    return {ok && elapsed < 300.0, "gains 0.3/0.8/1.2 at n_max 6/19/45, 101 points each, " + fmt(elapsed) + " s"};
}

Outcome sampling() {
    struct Case {
        std::string name;
        QuantumState state;
    };
    const std::vector<Case> cases{
        {"singlet_sector(1)", singlet_sector(1, Truncation{1})},
        {"bsv(0.8)+noise(0.9)", mix_white_noise(bsv({0.8, Truncation{bsv_min_truncation(0.8)}}), {0.9})},
    };
    bool ok = true;
    double worst_z = 0.0;
    for (const auto &c : cases) {
        const auto exact = evaluate(c.state);
        const auto estimates = estimate_all(sample_all_bases(c.state, 100000, 2024));
        for (std::size_t w = 0; w < 10; ++w) {
            const auto &e = estimates[w];
            const std::array<std::array<double, 3>, 3> checks{{{e.margin_hat, exact[w].margin, e.std_error},
                                                               {e.lhs_hat, exact[w].lhs, e.lhs_std_error},
                                                               {e.rhs_hat, exact[w].rhs, e.rhs_std_error}}};
            for (const auto &[est, ref, se] : checks) {
                const double diff = std::abs(est - ref);
                ok = ok && diff <= 5.0 * se + 1e-9;
                if (se > 0.0) {
                    worst_z = std::max(worst_z, diff / se);
                }
            }
        }
    }
    return {ok, "1e5 shots/basis on singlet_sector(1) and bsv(0.8)+noise(0.9), worst |z| " + fmt(worst_z)};
}

std::string slurp(const std::filesystem::path &p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
    const std::filesystem::path dir = std::filesystem::temp_directory_path() / "stokeslab_acceptance";
    std::filesystem::create_directories(dir);
    const std::vector<std::string> commands{
        "witness --state 'bsv(gain=0.8)+noise(p=0.2)'",
        "sweep --state 'bsv(gain=0.5)+noise(p=1)' --sweep noise.p --grid 0:1:0.05",
        "sample --state 'bsv(gain=0.5)+noise(p=0.9)' --shots 5000 --seed 7",
    };
    bool ok = true;
    for (std::size_t k = 0; k < commands.size(); ++k) {
        std::array<std::string, 2> outputs;
        for (int run = 0; run < 2; ++run) {
            const auto file = dir / ("run" + std::to_string(k) + "_" + std::to_string(run) + ".csv");
            const std::string cmd = std::string("\"") + STOKESLAB_CLI_PATH + "\" " + commands[k] + " --out \"" +
                                    file.string() + "\" 2>/dev/null";
            ok = ok && std::system(cmd.c_str()) == 0;
            outputs[static_cast<std::size_t>(run)] = slurp(file);
        }
        ok = ok && !outputs[0].empty() && outputs[0] == outputs[1];
    }
    std::filesystem::remove_all(dir);
    return {ok, "witness, sweep and sample invocations repeated twice, outputs compared byte for byte"};
}

}  // namespace

int main() {
    std::array<Outcome, 10> results;
    std::vector<std::string> sweep_table;
    results[0] = identities();
    results[1] = epr_zero();
    results[2] = singlet_values();
    results[3] = soundness();
    results[5] = reduction();
    results[6] = variance_oracle();
    results[7] = noise_sweep(sweep_table);
    results[8] = sampling();
    results[9] = determinism();
    results[4] = dominance();

    const std::array<const char *, 10> names{
        "operator identities",        "EPR zero lhs",  "singlet detection values",
        "separability soundness",     "dominance",     "reduction on BSV",
        "variance decomposition",     "noise sweep",   "sampling convergence",
        "CLI determinism",
    };
    int failed = 0;
    for (std::size_t k = 0; k < results.size(); ++k) {
        std::printf("%s %2zu %s: %s\n", results[k].pass ? "PASS" : "FAIL", k + 1, names[k], results[k].detail.c_str());
        failed += results[k].pass ? 0 : 1;
    }
    std::printf("\nnoise sweep thresholds (smallest detecting p on the 0.01 grid)\n");
    for (const auto &line : sweep_table) {
        std::printf("  %s\n", line.c_str());
    }
    std::printf("\n%d of %zu criteria passed\n", static_cast<int>(results.size()) - failed, results.size());
    return failed == 0 ? 0 : 1;
}
