#include "specvar/hull.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace specvar {

Vec nnls(const Mat& A, const Vec& b, int max_iter) {
    const Eigen::Index n = A.cols();
    if (max_iter <= 0) max_iter = static_cast<int>(3 * n + 30);
    Vec w = Vec::Zero(n);
    std::vector<bool> passive(n, false);
    const double tol = 1e-14 * (1.0 + A.norm()) * (1.0 + b.norm());

    auto solve_passive = [&](Vec& z) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index j = 0; j < n; ++j)
            if (passive[j]) idx.push_back(j);
        z = Vec::Zero(n);
        if (idx.empty()) return;
        Mat Ap(A.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) Ap.col(k) = A.col(idx[k]);
        const Vec zp = Ap.colPivHouseholderQr().solve(b);
        for (std::size_t k = 0; k < idx.size(); ++k) z[idx[k]] = zp[k];
    };

    for (int outer = 0; outer < max_iter; ++outer) {
        const Vec grad = A.transpose() * (b - A * w);
        Eigen::Index best = -1;
        double best_val = tol;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (!passive[j] && grad[j] > best_val) {
                best_val = grad[j];
                best = j;
            }
        }
        if (best < 0) break;
        passive[best] = true;

        for (int inner = 0; inner <= n; ++inner) {
            Vec z;
            solve_passive(z);
            bool feasible = true;
            for (Eigen::Index j = 0; j < n; ++j)
                if (passive[j] && z[j] <= 0.0) feasible = false;
            if (feasible) {
                w = z;
                break;
            }
            double alpha = 1.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                if (passive[j] && z[j] <= 0.0) alpha = std::min(alpha, w[j] / (w[j] - z[j]));
            }
            w += alpha * (z - w);
            for (Eigen::Index j = 0; j < n; ++j) {
                if (passive[j] && w[j] <= 1e-15) {
                    passive[j] = false;
                    w[j] = 0.0;
                }
            }
        }
    }
    return w;
}

namespace {

/// Coefficients (summing to one) of the point of aff(atoms) nearest the origin.
Vec affine_minimizer(const std::vector<Vec>& atoms) {
    const int k = static_cast<int>(atoms.size());
    Vec alpha(k);
    if (k == 1) {
        alpha[0] = 1.0;
        return alpha;
    }
    Mat D(atoms[0].size(), k - 1);
    for (int i = 1; i < k; ++i) D.col(i - 1) = atoms[i] - atoms[0];
    const Vec beta = D.completeOrthogonalDecomposition().solve(-atoms[0]);
    alpha[0] = 1.0 - beta.sum();
    alpha.tail(k - 1) = beta;
    return alpha;
}

Vec combine(const std::vector<Vec>& atoms, const std::vector<double>& w) {
    Vec p = Vec::Zero(atoms[0].size());
    for (std::size_t i = 0; i < atoms.size(); ++i) p += w[i] * atoms[i];
    return p;
}

} // namespace

MinNormPoint wolfe_min_norm_point(const LinearMaximizer& lmo, const Vec& target,
                                  const MinNormOptions& opts) {
    // Work with shifted atoms a = v - target and minimize ||sum w_i a_i||.
    MinNormPoint out;
    std::vector<Vec> atoms;
    std::vector<long> tags;
    std::vector<double> w;

    {
        auto [v, tag] = lmo(target);
        atoms.push_back(v - target);
        tags.push_back(tag);
        w.push_back(1.0);
    }
    Vec p = atoms[0];
    const double scale = 1.0 + target.norm() + atoms[0].norm();
    const double weight_eps = 1e-14;

    int it = 0;
    for (; it < opts.max_iter; ++it) {
        const double dist = p.norm();
        auto [v, tag] = lmo(-p);
        const Vec a = v - target;
        out.gap = p.squaredNorm() - p.dot(a);
        if (dist <= opts.distance_floor * scale || out.gap <= opts.gap_rel * dist) {
            out.converged = true;
            break;
        }
        if (std::find(tags.begin(), tags.end(), tag) != tags.end()) {
            // The oracle returned an active vertex: no further progress possible
            // at working precision.
            out.converged = out.gap <= 1e3 * std::numeric_limits<double>::epsilon() * scale * scale;
            break;
        }
        atoms.push_back(a);
        tags.push_back(tag);
        w.push_back(0.0);

        for (int minor = 0; minor < static_cast<int>(atoms.size()) + 1; ++minor) {
            const Vec alpha = affine_minimizer(atoms);
            if ((alpha.array() > weight_eps).all()) {
                for (std::size_t i = 0; i < w.size(); ++i) w[i] = alpha[i];
                break;
            }
            double theta = 1.0;
            for (std::size_t i = 0; i < w.size(); ++i) {
                const double denom = w[i] - alpha[i];
                if (alpha[i] <= weight_eps && denom > 0.0) theta = std::min(theta, w[i] / denom);
            }
            for (std::size_t i = 0; i < w.size(); ++i) w[i] = theta * alpha[i] + (1.0 - theta) * w[i];
            // Drop vanished atoms; always drop at least the most negative one.
            std::size_t drop = 0;
            double lowest = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < w.size(); ++i) {
                if (w[i] < lowest) {
                    lowest = w[i];
                    drop = i;
                }
            }
            std::vector<Vec> keep_atoms;
            std::vector<long> keep_tags;
            std::vector<double> keep_w;
            for (std::size_t i = 0; i < w.size(); ++i) {
                if (i == drop || w[i] <= weight_eps) continue;
                keep_atoms.push_back(atoms[i]);
                keep_tags.push_back(tags[i]);
                keep_w.push_back(w[i]);
            }
            atoms = std::move(keep_atoms);
            tags = std::move(keep_tags);
            w = std::move(keep_w);
            const double total = std::accumulate(w.begin(), w.end(), 0.0);
            for (double& wi : w) wi /= total;
        }
        p = combine(atoms, w);
    }
    out.iterations = it;
    out.nearest = p + target;
    out.distance = p.norm();
    out.tags = tags;
    out.weights = w;
    for (const Vec& a : atoms) out.atoms.push_back(a + target);
    return out;
}

MinNormPoint wolfe_min_norm_point(const std::vector<Vec>& vertices, const Vec& target,
                                  const MinNormOptions& opts) {
    if (vertices.empty()) throw Error(ErrorCode::InvalidParam, "empty vertex list");
    LinearMaximizer lmo = [&vertices](const Vec& c) {
        long best = 0;
        double best_val = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < vertices.size(); ++i) {
            const double v = c.dot(vertices[i]);
            if (v > best_val) {
                best_val = v;
                best = static_cast<long>(i);
            }
        }
        return std::make_pair(vertices[best], best);
    };
    return wolfe_min_norm_point(lmo, target, opts);
}

} // namespace specvar
