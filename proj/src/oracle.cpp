#include "specvar/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "specvar/hull.hpp"

#include <Eigen/QR>

namespace specvar {

Vec finite_difference_gradient(const ScalarField& f, const Vec& x, std::optional<double> h) {
    const double step = h.value_or(1e-5 * (1.0 + x.norm()));
    if (!(step > 0.0)) throw Error(ErrorCode::InvalidParam, "finite-difference step must be > 0");
    Vec g(x.size());
    Vec z = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double v[4];
        const double offsets[4] = {step, -step, 2.0 * step, -2.0 * step};
        for (int k = 0; k < 4; ++k) {
            z[i] = x[i] + offsets[k];
            v[k] = f(z);
            if (!std::isfinite(v[k]))
                throw Error(ErrorCode::InvalidData, "non-finite evaluation in finite differences");
        }
        z[i] = x[i];
        g[i] = (8.0 * (v[0] - v[1]) - (v[2] - v[3])) / (12.0 * step);
    }
    return g;
}

namespace {

Vec random_unit(Eigen::Index n, Rng& rng) {
    std::normal_distribution<double> normal;
    Vec u(n);
    do {
        for (Eigen::Index i = 0; i < n; ++i) u[i] = normal(rng);
    } while (u.norm() == 0.0);
    return u.normalized();
}

} // namespace

Verdict frechet_subgradient_test(const ScalarField& f, const Vec& x, const Vec& y, int trials,
                                 Rng& rng, const FrechetTestOptions& opts) {
    const double fx = f(x);
    if (!std::isfinite(fx)) throw Error(ErrorCode::InvalidData, "f(x) must be finite");
    const Eigen::Index n = x.size();

    std::vector<Vec> probes;
    if (y.norm() > 0.0) {
        probes.push_back(y.normalized());
        probes.push_back(-y.normalized());
    }
    if (x.norm() > 0.0) {
        probes.push_back(x.normalized());
        probes.push_back(-x.normalized());
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        probes.push_back(Vec::Unit(n, i));
        probes.push_back(-Vec::Unit(n, i));
    }

    std::vector<double> shell_min;
    for (double r : opts.radii) {
        double m = std::numeric_limits<double>::infinity();
        auto visit = [&](const Vec& u) {
            const Vec z = x + r * u;
            const double fz = f(z);
            const double q = (fz - fx - r * u.dot(y)) / r;
            if (std::isnan(q)) return;
            m = std::min(m, q);
        };
        for (const Vec& u : probes) visit(u);
        for (int t = 0; t < trials; ++t) visit(random_unit(n, rng));
        shell_min.push_back(m);
    }

    Verdict v;
    const std::size_t k = shell_min.size();
    v.estimate = k >= 2 ? std::min(shell_min[k - 1], shell_min[k - 2]) : shell_min.back();
    v.pass = v.estimate >= -opts.tol;
    std::ostringstream os;
    os << "shell minima:";
    for (std::size_t i = 0; i < k; ++i) os << " r=" << opts.radii[i] << ":" << shell_min[i];
    v.detail = os.str();
    return v;
}

Verdict limiting_subgradient_test(const ScalarField& f, const Vec& x, const Vec& y,
                                  const SequenceRecipe& recipe, Rng& rng, int trials) {
    if (recipe.direction.size() != x.size() || recipe.direction.norm() == 0.0)
        throw Error(ErrorCode::InvalidParam, "sequence recipe needs a nonzero direction");
    const Vec d = recipe.direction.normalized();
    const double fx = f(x);
    const double tol = 1e-4 * (1.0 + y.norm());

    std::vector<double> errors;
    std::vector<bool> frechet_ok;
    double value_gap = 0.0;
    for (int k = 0; k < recipe.steps; ++k) {
        const double t = recipe.t0 * std::pow(recipe.ratio, k);
        const Vec xk = x + t * d;
        const double fk = f(xk);
        if (!std::isfinite(fk)) {
            errors.push_back(std::numeric_limits<double>::infinity());
            frechet_ok.push_back(false);
            continue;
        }
        value_gap = std::abs(fk - fx);
        const Vec yk = finite_difference_gradient(f, xk, 1e-4 * t);
        FrechetTestOptions opts;
        opts.radii = {1e-4 * t, 1e-5 * t, 1e-6 * t};
        frechet_ok.push_back(frechet_subgradient_test(f, xk, yk, trials, rng, opts).pass);
        errors.push_back((yk - y).norm());
    }

    Verdict v;
    const int tail = std::min(3, recipe.steps);
    bool ok = true;
    double worst = 0.0;
    for (int k = recipe.steps - tail; k < recipe.steps; ++k) {
        worst = std::max(worst, errors[k]);
        ok = ok && frechet_ok[k] && errors[k] <= tol;
    }
    v.estimate = worst;
    v.pass = ok && value_gap <= 1e-3 * (1.0 + std::abs(fx));
    v.inconclusive = !v.pass;
    std::ostringstream os;
    os << "tail |y_n - y| = " << worst << ", |f(x_n) - f(x)| = " << value_gap;
    if (!v.pass) os << " (recipe exhausted without a converging subgradient sequence)";
    v.detail = os.str();
    return v;
}

namespace {

/// Lattice moves: every nonzero pattern in {-1, 0, 1}^n.
std::vector<Vec> lattice_moves(Eigen::Index n) {
    std::vector<Vec> out;
    int total = 1;
    for (Eigen::Index i = 0; i < n; ++i) total *= 3;
    for (int code = 0; code < total; ++code) {
        Vec m(n);
        int c = code;
        for (Eigen::Index i = 0; i < n; ++i) {
            m[i] = static_cast<double>(c % 3) - 1.0;
            c /= 3;
        }
        if (m.cwiseAbs().sum() > 0.0) out.push_back(m);
    }
    return out;
}

/// Pattern search inside the membership band of half-width band_ratio * s.
/// Besides lattice and halving moves it tries steps orthogonal to x - p
/// followed by a scan back along x - p, which follows curved boundaries.
Vec polish(const MembershipTest& contains, const Vec& x, Vec p, double s, double s_min) {
    const Eigen::Index n = x.size();
    const auto moves = lattice_moves(n);
    const auto side_moves = n > 1 ? lattice_moves(n - 1) : std::vector<Vec>{};
    constexpr double band_ratio = 0.5;
    const int subsets = 1 << n;
    while (s > s_min) {
        for (int rounds = 0; rounds < 200; ++rounds) {
            const double band = band_ratio * s;
            const bool p_ok = contains(p, band);
            Vec best = p;
            double best_d = p_ok ? (p - x).norm() : std::numeric_limits<double>::infinity();
            auto consider = [&](const Vec& q) {
                const double dq = (q - x).norm();
                if (dq >= best_d || !contains(q, band)) return;
                best_d = dq;
                best = q;
            };
            for (const Vec& m : moves) {
                consider(p + s * m);
                consider(p + 0.5 * s * m);
            }
            for (int mask = 1; mask < subsets; ++mask) {
                Vec q = p;
                for (Eigen::Index i = 0; i < n; ++i)
                    if ((mask >> i) & 1) q[i] *= 0.5;
                consider(q);
            }
            const double gap = (x - p).norm();
            if (n > 1 && gap > 0.0) {
                const Vec u = (x - p) / gap;
                const Mat Q = Eigen::HouseholderQR<Mat>(u).householderQ();
                const Mat T = Q.rightCols(n - 1);
                for (const Vec& c : side_moves) {
                    const Vec t = T * c.normalized();
                    for (double step : {s, 0.5 * s}) {
                        // Slide back along u to the edge of the band nearest x.
                        const Vec q0 = p + step * t;
                        int k = 4;
                        while (k >= -4 && !contains(q0 + (0.25 * k * step) * u, band)) --k;
                        if (k < -4) continue;
                        double lo = 0.25 * k * step, hi = lo + 0.25 * step;
                        if (k < 4) {
                            for (int it = 0; it < 20; ++it) {
                                const double mid = 0.5 * (lo + hi);
                                (contains(q0 + mid * u, band) ? lo : hi) = mid;
                            }
                        }
                        consider(q0 + lo * u);
                    }
                }
            }
            if (!std::isfinite(best_d) || best == p) break;
            p = best;
        }
        s *= 0.5;
    }
    return p;
}

} // namespace

std::vector<Vec> brute_project(const MembershipTest& contains, const Vec& x, double box_radius,
                               int depth) {
    const Eigen::Index n = x.size();
    if (n > 4) throw Error(ErrorCode::TooLarge, "brute_project supports dimension <= 4");
    if (!(box_radius > 0.0)) throw Error(ErrorCode::InvalidParam, "box_radius must be > 0");
    // Keep the grid below ~2e5 points.
    while (depth > 1 && std::pow(std::pow(2.0, depth + 1) + 1.0, static_cast<double>(n)) > 2e5)
        --depth;
    const int half = 1 << depth;
    const double h = box_radius / half;
    const double seed_band = 0.5 * h * std::sqrt(static_cast<double>(n));

    struct Seed {
        Vec p;
        double d;
    };
    std::vector<Seed> seeds;
    std::vector<int> idx(n, -half);
    while (true) {
        Vec p(n);
        for (Eigen::Index i = 0; i < n; ++i) p[i] = x[i] + h * idx[i];
        if (contains(p, seed_band)) seeds.push_back({p, (p - x).norm()});
        Eigen::Index i = 0;
        while (i < n && ++idx[i] > half) idx[i++] = -half;
        if (i == n) break;
    }
    if (seeds.empty()) throw Error(ErrorCode::Infeasible, "no grid point near the set");
    std::sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) { return a.d < b.d; });

    // Spread-out seeds among the closest ones so separate basins are polished.
    std::vector<Vec> starts;
    const double cutoff = seeds.front().d + 2.0 * seed_band + h;
    for (const Seed& s : seeds) {
        if (s.d > cutoff || starts.size() >= 24) break;
        bool far = true;
        for (const Vec& q : starts)
            if ((q - s.p).norm() < 2.0 * h) far = false;
        if (far) starts.push_back(s.p);
    }

    // Coarse polish of every start, then fine polish of the competitive ones.
    const double scale = 1.0 + x.norm() + box_radius;
    const double coarse = 1e-3 * scale;
    std::vector<Vec> rough;
    std::vector<double> rough_d;
    for (const Vec& s : starts) {
        rough.push_back(polish(contains, x, s, 2.0 * seed_band, coarse));
        rough_d.push_back((rough.back() - x).norm());
    }
    const double rough_best = *std::min_element(rough_d.begin(), rough_d.end());
    std::vector<Vec> polished;
    std::vector<double> dist;
    for (std::size_t i = 0; i < rough.size(); ++i) {
        if (rough_d[i] > rough_best + 4.0 * coarse) continue;
        polished.push_back(polish(contains, x, rough[i], coarse, 1e-12 * scale));
        dist.push_back((polished.back() - x).norm());
    }
    const double best = *std::min_element(dist.begin(), dist.end());
    std::vector<Vec> out;
    for (std::size_t i = 0; i < polished.size(); ++i) {
        if (dist[i] > best + 1e-8 * scale) continue;
        bool dup = false;
        for (const Vec& q : out)
            if ((q - polished[i]).norm() < 1e-6 * scale) dup = true;
        if (!dup) out.push_back(polished[i]);
    }
    return out;
}

Verdict brute_hull_membership(GroupClass g, const Vec& y, const Vec& x, std::uint64_t n_cap) {
    if (x.size() != y.size()) throw Error(ErrorCode::InvalidShape, "x and y differ in size");
    const auto group = group_enumerate(g, static_cast<int>(y.size()), n_cap);
    std::vector<Vec> orbit;
    for (const GroupElement& s : group) {
        Vec p = s.apply(y);
        bool dup = false;
        for (const Vec& q : orbit)
            if ((q - p).norm() <= 1e-14 * (1.0 + y.norm())) dup = true;
        if (!dup) orbit.push_back(std::move(p));
    }
    // min |sum_j u_j (v_j - x)|^2 + (sum_j u_j - 1)^2 over u >= 0 is solved by
    // u = w / (1 + d^2) with w the convex weights of the nearest point.
    const Eigen::Index n = y.size();
    const Eigen::Index m = static_cast<Eigen::Index>(orbit.size());
    const double scale = 1.0 + y.norm() + x.norm();
    Mat A(n + 1, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        A.col(j).head(n) = (orbit[j] - x) / scale;
        A(n, j) = 1.0;
    }
    Vec b = Vec::Zero(n + 1);
    b[n] = 1.0;
    Vec w = nnls(A, b);
    if (w.sum() > 0.0) w /= w.sum();
    Vec p = Vec::Zero(n);
    for (Eigen::Index j = 0; j < m; ++j) p += w[j] * orbit[j];

    Verdict v;
    v.estimate = (p - x).norm();
    v.pass = v.estimate <= 1e-9;
    v.detail = "orbit size " + std::to_string(m) + " over " + to_string(g) + " group";
    return v;
}

Verdict brute_hull_membership(const SystemKind& kind, const Vec& y, const Vec& x,
                              std::uint64_t n_cap) {
    if (y.size() != kind.spectrum_dim() || x.size() != kind.spectrum_dim())
        throw Error(ErrorCode::InvalidShape, "vectors do not match the reduced space");
    const int gd = kind.group_dim();
    if (kind.product && std::abs(x[gd] - y[gd]) > 1e-12 * (1.0 + std::abs(y[gd]))) {
        // The lifted scalar is fixed by the group.
        Verdict v;
        v.estimate = std::abs(x[gd] - y[gd]);
        v.pass = v.estimate <= 1e-9;
        v.detail = "lifted coordinate differs";
        if (v.pass) return brute_hull_membership(group_class(kind), y.head(gd), x.head(gd), n_cap);
        return v;
    }
    return brute_hull_membership(group_class(kind), y.head(gd), x.head(gd), n_cap);
}

} // namespace specvar
