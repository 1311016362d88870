#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "specvar/io.hpp"
#include "specvar/varcalc.hpp"

namespace specvar {

inline constexpr const char* kVersion = "0.1.0";

/// Counter-based seed split: independent stream per (check, trial).
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t counter);
Rng trial_rng(std::uint64_t master, std::string_view stream, std::uint64_t counter);

std::vector<CheckRecord> verify_axioms(long trials, std::uint64_t seed);
/// `trials` random points per (set, system) pairing.
std::vector<CheckRecord> verify_projections(long trials, std::uint64_t seed);
std::vector<CheckRecord> verify_normals(long trials, std::uint64_t seed);
/// Includes verify_regression and verify_commutation(trials / 10).
std::vector<CheckRecord> verify_subgradients(long trials, std::uint64_t seed);
/// Product of eigenvalues at Diag(1,2).
std::vector<CheckRecord> verify_regression();
std::vector<CheckRecord> verify_commutation(long runs, std::uint64_t seed);
std::vector<CheckRecord> verify_clarke(std::uint64_t seed, const ClarkeOptions& opts);
/// `trials` random pairs per system.
std::vector<CheckRecord> verify_lidskii(long trials, std::uint64_t seed);

/// Options used by the clarke suite.
ClarkeOptions default_clarke_options();

std::vector<std::string> suite_names();
long default_trials(std::string_view suite);

/// Runs a suite ("all" runs every suite in order). wall_time is filled in.
RunReport run_suite(std::string_view suite, std::uint64_t seed,
                    std::optional<long> trials = std::nullopt);

} // namespace specvar
