#include <algorithm>
#include <cmath>
#include <limits>

#include "specvar/varcalc.hpp"

namespace specvar {

ClarkeEstimate clarke_subdifferential(const FunctionOracle& f, const SystemKind& kind,
                                      const Ambient& X, const ClarkeOptions& opts, Rng& rng) {
    require_group(f.group, kind, f.name);
    if (opts.radii.empty() || opts.samples_per_radius < 1 || opts.decompositions < 1)
        throw Error(ErrorCode::InvalidParam, "invalid gradient-sampling options");
    const Vec x = spectrum(kind, X);
    const int sd = static_cast<int>(x.size());
    ClarkeEstimate est;

    // Formula side: Clarke gradients of phi near gamma(X), lifted through A_X.
    std::vector<Vec> grads;
    for (double r : opts.radii) {
        for (int i = 0; i < opts.samples_per_radius; ++i) {
            const Vec z = x + r * random_gaussian(sd, rng).normalized();
            const bool smooth = f.smooth_at ? f.smooth_at(z) : is_smooth_point(f.eval, z, 1e-3 * r);
            if (!smooth) continue;
            const Vec g = f.grad ? f.grad(z) : finite_difference_gradient(f.eval, z, 1e-4 * r);
            bool dup = false;
            for (const Vec& o : grads)
                if ((o - g).norm() <= 1e-12 * (1.0 + g.norm())) dup = true;
            if (!dup) grads.push_back(g);
        }
    }
    if (grads.empty()) throw Error(ErrorCode::NumericalFailure, "no smooth sample near the spectrum");
    const auto decs = sample_decompositions(kind, X, opts.decompositions, std::nullopt, rng);
    for (const Decomposition& d : decs)
        for (const Vec& g : grads) est.formula.points.push_back(apply_isometry(d, g));

    // Definition side: gradients of Phi at random smooth points near X.
    const ScalarField phi = ambient_field(f, kind);
    const Vec c0 = to_coords(kind, X);
    const double f0 = phi(c0);
    const int n = static_cast<int>(c0.size());
    const double floor_scale = 1.0 + c0.norm();
    std::vector<double> lipschitz;
    for (double r : opts.radii) {
        const double probe = std::max(1e-3 * r, 1e-7 * floor_scale);
        const double h = std::max(1e-4 * r, 1e-8 * floor_scale);
        double L = 0.0;
        for (int i = 0; i < opts.samples_per_radius; ++i) {
            const Vec c = c0 + r * random_gaussian(n, rng).normalized();
            const double fc = phi(c);
            if (!std::isfinite(fc)) throw Error(ErrorCode::NotLipschitz, "infinite value near X");
            L = std::max(L, std::abs(fc - f0) / r);
            if (!is_smooth_point(phi, c, probe)) continue;
            est.definition.points.push_back(from_coords(kind, finite_difference_gradient(phi, c, h)));
        }
        lipschitz.push_back(L);
    }
    const auto [lo, hi] = std::minmax_element(opts.radii.begin(), opts.radii.end());
    est.lipschitz_outer = lipschitz[hi - opts.radii.begin()];
    est.lipschitz_inner = lipschitz[lo - opts.radii.begin()];
    if (est.lipschitz_inner > 4.0 * est.lipschitz_outer + 1e-12)
        throw Error(ErrorCode::NotLipschitz, "difference quotients grow as the radius shrinks");
    if (est.definition.points.empty())
        throw Error(ErrorCode::NumericalFailure, "no smooth sample near X");
    return est;
}

double support_gap(const SystemKind& kind, const HullApprox& A, const HullApprox& B,
                   int directions, Rng& rng) {
    if (A.points.empty() || B.points.empty())
        throw Error(ErrorCode::InvalidParam, "support_gap needs nonempty point sets");
    auto stack = [&](const HullApprox& H) {
        Mat P(ambient_dim(kind), static_cast<Eigen::Index>(H.points.size()));
        for (std::size_t j = 0; j < H.points.size(); ++j) P.col(j) = to_coords(kind, H.points[j]);
        return P;
    };
    const Mat PA = stack(A);
    const Mat PB = stack(B);
    double gap = 0.0;
    for (int i = 0; i < directions; ++i) {
        const Vec u = random_gaussian(static_cast<int>(PA.rows()), rng).normalized();
        const double ha = (u.transpose() * PA).maxCoeff();
        const double hb = (u.transpose() * PB).maxCoeff();
        gap = std::max(gap, std::abs(ha - hb));
    }
    return gap;
}

} // namespace specvar
