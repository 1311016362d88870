#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "specvar/group.hpp"
#include "specvar/systems.hpp"

// Brute-force and definition-based checks. Nothing here calls into the
// transfer formulas or the hull solver they validate.

namespace specvar {

struct Verdict {
    bool pass = false;
    double estimate = 0.0;
    std::string detail;
    /// Set when the test could not reach a conclusion (reported as a fail).
    bool inconclusive = false;
};

using ScalarField = std::function<double(const Vec&)>;

/// Fourth-order central differences (steps h and 2h), default h = 1e-5 * (1 + |x|).
Vec finite_difference_gradient(const ScalarField& f, const Vec& x,
                               std::optional<double> h = std::nullopt);

struct FrechetTestOptions {
    std::vector<double> radii{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    double tol = 1e-4;
};

/// Samples the quotient [f(z) - f(x) - <z - x, y>] / |z - x| on shells around
/// x, along +-y, +-x, the axes and random directions. The estimate is the
/// minimum over the two innermost shells; the per-shell profile goes into
/// `detail`.
Verdict frechet_subgradient_test(const ScalarField& f, const Vec& x, const Vec& y, int trials,
                                 Rng& rng, const FrechetTestOptions& opts = {});

/// x_n = x + t0 * ratio^n * direction.
struct SequenceRecipe {
    Vec direction;
    double t0 = 0.1;
    double ratio = 0.5;
    int steps = 16;
};

Verdict limiting_subgradient_test(const ScalarField& f, const Vec& x, const Vec& y,
                                  const SequenceRecipe& recipe, Rng& rng, int trials = 64);

using MembershipTest = std::function<bool(const Vec&, double)>;

/// Grid seeding inside the box of radius `box_radius` around x followed by a
/// pattern-search polish. Returns every polished point within tolerance of
/// the best distance (distinct up to 1e-6). Throws Infeasible if no grid
/// point is near the set.
std::vector<Vec> brute_project(const MembershipTest& contains, const Vec& x, double box_radius,
                               int depth = 4);

/// Exact distance from x to conv{s.y : s in the enumerated group}; pass iff
/// the distance is at most 1e-9.
Verdict brute_hull_membership(GroupClass g, const Vec& y, const Vec& x,
                              std::uint64_t n_cap = 100000);
Verdict brute_hull_membership(const SystemKind& kind, const Vec& y, const Vec& x,
                              std::uint64_t n_cap = 100000);

} // namespace specvar
