#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "specvar/group.hpp"
#include "specvar/oracle.hpp"
#include "specvar/systems.hpp"

namespace specvar {

struct SupportValue {
    double value = 0.0;
    /// s with <c, s.y> = value.
    GroupElement maximizer;
};

/// max over the group of <c, s.y>, computed by rearrangement.
SupportValue support_oracle(const SystemKind& kind, const Vec& c, const Vec& y);
SupportValue support_oracle(GroupClass g, const Vec& c, const Vec& y);

struct HullCertificate {
    double distance = 0.0;
    std::vector<std::pair<GroupElement, double>> coefficients;
    Vec nearest;
    /// Unit vector c with <c, x> > max_s <c, s.y> + tol/2; set when distance > tol.
    std::optional<Vec> separating_direction;
    double gap = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Distance from x to conv(S.y) by a minimum-norm-point iteration that only
/// queries support_oracle. A result with converged == false is still a valid
/// upper bound on the distance.
HullCertificate orbit_hull_distance(const SystemKind& kind, const Vec& y, const Vec& x,
                                    double tol = 1e-7, int max_iter = 10000);
HullCertificate orbit_hull_distance(GroupClass g, const Vec& y, const Vec& x,
                                    double tol = 1e-7, int max_iter = 10000);

/// Partial-sum tests: x in conv(S.y) for the permutation group (majorization)
/// and the signed group (weak majorization of absolute values). Even-signed
/// groups throw Unsupported.
Verdict majorization_inequalities(GroupClass g, const Vec& x, const Vec& y);

struct LidskiiReport {
    Vec increment;      ///< gamma(X + Y) - gamma(X)
    Vec target;         ///< gamma(Y)
    HullCertificate certificate;
    bool pass = false;
    std::optional<Verdict> majorization;
    /// Majorization verdict matches the hull verdict (true when not run).
    bool verdicts_agree = true;
};

LidskiiReport lidskii_check(const SystemKind& kind, const Ambient& X, const Ambient& Y,
                            double tol = 1e-7);

} // namespace specvar
