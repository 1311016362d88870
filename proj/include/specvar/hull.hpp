#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "specvar/systems.hpp"

namespace specvar {

/// Lawson-Hanson non-negative least squares: argmin ||A w - b|| s.t. w >= 0.
Vec nnls(const Mat& A, const Vec& b, int max_iter = 0);

/// Linear maximization oracle: returns a vertex v maximizing <c, v> over the
/// atom set together with an integer tag identifying it to the caller.
using LinearMaximizer = std::function<std::pair<Vec, long>(const Vec& c)>;

struct MinNormPoint {
    Vec nearest;                 ///< point of the hull closest to the target
    std::vector<Vec> atoms;      ///< active vertices
    std::vector<long> tags;      ///< caller tags of the active vertices
    std::vector<double> weights; ///< convex weights of the active vertices
    double distance = 0.0;
    double gap = 0.0;            ///< Frank-Wolfe duality gap at termination
    int iterations = 0;
    bool converged = false;
};

struct MinNormOptions {
    int max_iter = 10000;
    /// Stop when gap <= gap_rel * distance (certifies distance up to gap_rel).
    double gap_rel = 1e-9;
    /// Stop when the distance itself falls below this floor.
    double distance_floor = 1e-14;
};

/// Wolfe's minimum-norm-point algorithm over conv(atoms) measured from
/// `target`, driven only by a linear maximization oracle.
MinNormPoint wolfe_min_norm_point(const LinearMaximizer& lmo, const Vec& target,
                                  const MinNormOptions& opts = {});

/// Same algorithm over an explicit vertex list (tags are vertex indices).
MinNormPoint wolfe_min_norm_point(const std::vector<Vec>& vertices, const Vec& target,
                                  const MinNormOptions& opts = {});

} // namespace specvar
