#pragma once

#include <gtest/gtest.h>

#include <vector>

#include "stokeslab/witnesses.hpp"

namespace testing_helpers {

// eval_all plus the dominance check, so every state any test evaluates is
// also checked for improved-over-base containment.
inline std::vector<stokeslab::WitnessReport> checked_eval_all(const stokeslab::QuantumState &state) {
    auto reports = stokeslab::eval_all(state);
    const auto problems = stokeslab::dominance_violations(reports);
    EXPECT_TRUE(problems.empty()) << problems.front();
    return reports;
}

inline const stokeslab::WitnessReport &report_for(const std::vector<stokeslab::WitnessReport> &reports,
                                                  stokeslab::WitnessId id) {
    return reports.at(static_cast<std::size_t>(id));
}

}  // namespace testing_helpers
