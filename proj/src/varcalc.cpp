#include "specvar/varcalc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "specvar/hull.hpp"

namespace specvar {

std::string to_string(Flavor f) {
    switch (f) {
    case Flavor::Frechet: return "frechet";
    case Flavor::Limiting: return "limiting";
    case Flavor::Clarke: return "clarke";
    case Flavor::Gradient: return "gradient";
    case Flavor::Normal: return "normal";
    case Flavor::LimitingNormal: return "limiting_normal";
    }
    return "unknown";
}

double eval_spectral(const FunctionOracle& f, const SystemKind& kind, const Ambient& X) {
    require_group(f.group, kind, f.name);
    return f.eval(spectrum(kind, X));
}

ScalarField ambient_field(const FunctionOracle& f, const SystemKind& kind) {
    return [f, kind](const Vec& c) { return f.eval(spectrum(kind, from_coords(kind, c))); };
}

Ambient spectral_gradient(const FunctionOracle& f, const SystemKind& kind, const Ambient& X,
                          std::optional<double> tie_tol) {
    require_group(f.group, kind, f.name);
    if (!f.grad) throw Error(ErrorCode::NotDifferentiable, f.name + " has no gradient oracle");
    const Vec x = spectrum(kind, X);
    if (!is_smooth_point(f, x))
        throw Error(ErrorCode::NotDifferentiable, f.name + " is not differentiable at the spectrum");
    return apply_isometry(decompose(kind, X, tie_tol), f.grad(x));
}

SubgradientWitness transfer_frechet_subgradient(const Vec& x, const Vec& y, const Decomposition& d) {
    SubgradientWitness w;
    w.base = apply_isometry(d, x);
    w.vector = apply_isometry(d, y);
    w.flavor = Flavor::Frechet;
    w.invariant = y;
    w.decomposition = d;
    return w;
}

namespace {

void push_unique(std::vector<SubgradientWitness>& out, SubgradientWitness w) {
    for (const auto& o : out)
        if ((o.vector - w.vector).norm() <= 1e-9 && (o.base - w.base).norm() <= 1e-9) return;
    out.push_back(std::move(w));
}

Vec random_convex_combination(const std::vector<Vec>& vertices, Rng& rng) {
    std::exponential_distribution<double> expo(1.0);
    Vec out = Vec::Zero(vertices.front().size());
    double total = 0.0;
    for (const Vec& v : vertices) {
        const double w = expo(rng);
        out += w * v;
        total += w;
    }
    return out / total;
}

using SubdiffOracle = std::function<std::optional<VertexSet>(const Vec&)>;

std::vector<SubgradientWitness> transfer_set(const FunctionOracle& f, const SubdiffOracle& oracle,
                                             Flavor flavor, const SystemKind& kind,
                                             const Ambient& X, int samples, Rng& rng,
                                             std::optional<double> tie_tol) {
    require_group(f.group, kind, f.name);
    if (samples < 1) throw Error(ErrorCode::InvalidParam, "samples must be >= 1");
    const Vec x = spectrum(kind, X);
    std::optional<VertexSet> set;
    if (oracle) set = oracle(x);
    if (!set) {
        if (f.grad && is_smooth_point(f, x)) set = VertexSet{{f.grad(x)}, true};
        else
            throw Error(ErrorCode::Unsupported,
                        f.name + " has no " + to_string(flavor) + " subdifferential oracle here");
    }
    std::vector<SubgradientWitness> out;
    if (set->vertices.empty()) return out;
    const auto decs = sample_decompositions(kind, X, samples, tie_tol, rng);
    for (const Decomposition& d : decs) {
        std::vector<Vec> ys = set->vertices;
        if (set->convex_hull && ys.size() > 1) ys.push_back(random_convex_combination(set->vertices, rng));
        for (const Vec& y : ys) {
            SubgradientWitness w = transfer_frechet_subgradient(x, y, d);
            w.flavor = flavor;
            push_unique(out, std::move(w));
        }
    }
    return out;
}

} // namespace

std::vector<SubgradientWitness> frechet_subdifferential(const FunctionOracle& f,
                                                        const SystemKind& kind, const Ambient& X,
                                                        int samples, Rng& rng,
                                                        std::optional<double> tie_tol) {
    return transfer_set(f, f.frechet_subdiff, Flavor::Frechet, kind, X, samples, rng, tie_tol);
}

std::vector<SubgradientWitness> limiting_subdifferential(const FunctionOracle& f,
                                                         const SystemKind& kind, const Ambient& X,
                                                         int samples, Rng& rng,
                                                         std::optional<double> tie_tol) {
    return transfer_set(f, f.limiting_subdiff, Flavor::Limiting, kind, X, samples, rng, tie_tol);
}

std::vector<ProjectionWitness> spectral_project(const SetOracle& D, const SystemKind& kind,
                                                const Ambient& X, int count, Rng& rng) {
    require_group(D.group, kind, D.name);
    if (count < 1) throw Error(ErrorCode::InvalidParam, "count must be >= 1");
    const Vec x = spectrum(kind, X);
    const ProjectionSet proj = D.project(x);
    if (proj.points.empty())
        throw Error(ErrorCode::NumericalFailure, D.name + " returned an empty projection");
    const auto decs = sample_decompositions(kind, X, count, std::nullopt, rng);
    std::vector<ProjectionWitness> out;
    for (const Vec& z : proj.points) {
        for (const Decomposition& d : decs) {
            ProjectionWitness w{apply_isometry(d, z), z, d, proj.multivalued};
            bool dup = false;
            for (const auto& o : out)
                if ((o.point - w.point).norm() <= 1e-9) dup = true;
            if (!dup) out.push_back(std::move(w));
        }
    }
    return out;
}

double spectral_distance(const SetOracle& D, const SystemKind& kind, const Ambient& X) {
    require_group(D.group, kind, D.name);
    return D.distance(spectrum(kind, X));
}

Verdict frechet_normal_membership(const ScalarField& dist, const Vec& x, const Vec& y,
                                  const LimitSchedule& schedule) {
    if (schedule.steps < 7 || !(schedule.ratio > 0.0 && schedule.ratio < 1.0) ||
        !(schedule.alpha0 > 0.0))
        throw Error(ErrorCode::InvalidParam, "invalid limit schedule");
    if (x.size() != y.size()) throw Error(ErrorCode::InvalidShape, "x and y differ in size");
    if (dist(x) > 1e-8 * (1.0 + x.norm()))
        throw Error(ErrorCode::NotInSet, "base point is not in the set");
    const double ny = y.norm();
    Verdict v;
    if (ny == 0.0) {
        v.pass = true;
        v.detail = "zero vector";
        return v;
    }
    std::vector<double> q;
    double alpha = schedule.alpha0;
    for (int k = 0; k < schedule.steps; ++k, alpha *= schedule.ratio)
        q.push_back(dist(x + alpha * y) / alpha);
    // Richardson elimination of the first-order term, then tail averaging.
    const double rho = schedule.ratio;
    std::vector<double> r;
    for (std::size_t k = 0; k + 1 < q.size(); ++k) r.push_back((q[k + 1] - rho * q[k]) / (1.0 - rho));
    const std::size_t tail = 5;
    double est = 0.0;
    for (std::size_t k = r.size() - tail; k < r.size(); ++k) est += r[k];
    est /= static_cast<double>(tail);
    v.estimate = est;
    v.pass = std::abs(est - ny) <= 1e-4 * (1.0 + ny);
    std::ostringstream os;
    os << "limit estimate " << est << " vs |y| = " << ny << ", last raw quotient " << q.back();
    v.detail = os.str();
    return v;
}

Verdict frechet_normal_membership(const SetOracle& D, const Vec& x, const Vec& y,
                                  const LimitSchedule& schedule) {
    if (!D.contains(x, 1e-8 * (1.0 + x.norm())))
        throw Error(ErrorCode::NotInSet, "base point is not in " + D.name);
    return frechet_normal_membership([&D](const Vec& z) { return D.distance(z); }, x, y, schedule);
}

Verdict frechet_normal_membership(const SetOracle& D, const SystemKind& kind, const Ambient& X,
                                  const Ambient& Y, const LimitSchedule& schedule) {
    require_group(D.group, kind, D.name);
    const Vec gx = spectrum(kind, X);
    if (!D.contains(gx, 1e-8 * (1.0 + gx.norm())))
        throw Error(ErrorCode::NotInSet, "spectrum of the base point is not in " + D.name);
    ScalarField dist = [&](const Vec& c) { return spectral_distance(D, kind, from_coords(kind, c)); };
    return frechet_normal_membership(dist, to_coords(kind, X), to_coords(kind, Y), schedule);
}

namespace {

std::vector<SubgradientWitness> transfer_cones(const std::vector<ConeGenerators>& cones,
                                               Flavor flavor, const SystemKind& kind,
                                               const Ambient& X, const Vec& x, int count,
                                               Rng& rng) {
    const auto decs = sample_decompositions(kind, X, count, std::nullopt, rng);
    const int dim = static_cast<int>(x.size());
    std::vector<SubgradientWitness> out;
    for (const Decomposition& d : decs) {
        for (const ConeGenerators& cone : cones) {
            std::vector<Vec> ys;
            if (cone.rays.empty()) {
                ys.push_back(Vec::Zero(dim));
            } else {
                for (const Vec& r : cone.rays) {
                    ys.push_back(r);
                    if (cone.linear) ys.push_back(-r);
                }
                ys.push_back(cone_sample(cone, dim, rng));
            }
            for (const Vec& y : ys) {
                SubgradientWitness w = transfer_frechet_subgradient(x, y, d);
                w.flavor = flavor;
                push_unique(out, std::move(w));
            }
        }
    }
    return out;
}

} // namespace

std::vector<SubgradientWitness> spectral_normal_cone_elements(const SetOracle& D,
                                                              const SystemKind& kind,
                                                              const Ambient& X, int count,
                                                              Rng& rng) {
    require_group(D.group, kind, D.name);
    const Vec x = spectrum(kind, X);
    if (!D.contains(x, 1e-8 * (1.0 + x.norm())))
        throw Error(ErrorCode::NotInSet, "spectrum is not in " + D.name);
    if (!D.frechet_normal) throw Error(ErrorCode::Unsupported, D.name + " has no normal cone oracle");
    const auto cone = D.frechet_normal(x);
    if (!cone) throw Error(ErrorCode::Unsupported, D.name + " normal cone unavailable here");
    return transfer_cones({*cone}, Flavor::Normal, kind, X, x, count, rng);
}

std::vector<SubgradientWitness> spectral_limiting_normal_elements(const SetOracle& D,
                                                                  const SystemKind& kind,
                                                                  const Ambient& X, int count,
                                                                  Rng& rng) {
    require_group(D.group, kind, D.name);
    const Vec x = spectrum(kind, X);
    if (!D.contains(x, 1e-8 * (1.0 + x.norm())))
        throw Error(ErrorCode::NotInSet, "spectrum is not in " + D.name);
    if (!D.limiting_normal)
        throw Error(ErrorCode::Unsupported, D.name + " has no limiting normal cone oracle");
    const auto cones = D.limiting_normal(x);
    if (!cones) throw Error(ErrorCode::Unsupported, D.name + " limiting normal cone unavailable here");
    return transfer_cones(*cones, Flavor::LimitingNormal, kind, X, x, count, rng);
}

namespace {

/// Rotates U within spectral clusters so that U^T B U is diagonal on each
/// cluster block (EigSym).
Decomposition align_eigsym(const Decomposition& d, const Vec& spec, const Mat& B, double tie_tol) {
    Decomposition out = d;
    for (auto [a, b] : spectral_clusters(spec, tie_tol)) {
        const int k = b - a;
        if (k < 2) continue;
        const Mat Uc = d.U.middleCols(a, k);
        const Mat block = Uc.transpose() * B * Uc;
        Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (block + block.transpose()));
        out.U.middleCols(a, k) = Uc * es.eigenvectors();
    }
    return out;
}

} // namespace

CommutationReport commutation_check(const FunctionOracle& f, const SystemKind& kind,
                                    const SmoothAmbientFunction& psi, const Ambient& X, double tol,
                                    int samples, Rng& rng) {
    require_group(f.group, kind, f.name);
    const Vec x = spectrum(kind, X);
    std::optional<VertexSet> set;
    if (f.frechet_subdiff) set = f.frechet_subdiff(x);
    if (!set && f.grad && is_smooth_point(f, x)) set = VertexSet{{f.grad(x)}, true};
    if (!set) throw Error(ErrorCode::Unsupported, f.name + " has no Fréchet subdifferential oracle");

    const Ambient G = psi.grad(X);
    CommutationReport rep;
    if (kind.family == Family::EigSym && !kind.product)
        rep.commutator = (X.data * G.data - G.data * X.data).norm();
    rep.residual = std::numeric_limits<double>::infinity();
    if (set->vertices.empty()) return rep;

    auto decs = sample_decompositions(kind, X, samples, std::nullopt, rng);
    if (kind.family == Family::EigSym && !kind.product)
        decs.push_back(align_eigsym(decs.front(), x, -G.data, default_tie_tol(X)));

    const Vec target = -to_coords(kind, G);
    for (const Decomposition& d : decs) {
        std::vector<Vec> lifted;
        for (const Vec& y : set->vertices) lifted.push_back(to_coords(kind, apply_isometry(d, y)));
        Vec y_best;
        double res;
        if (set->convex_hull) {
            const MinNormPoint mnp = wolfe_min_norm_point(lifted, target);
            res = mnp.distance;
            y_best = Vec::Zero(x.size());
            for (std::size_t i = 0; i < mnp.tags.size(); ++i)
                y_best += mnp.weights[i] * set->vertices[mnp.tags[i]];
        } else {
            res = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < lifted.size(); ++i) {
                const double r = (lifted[i] - target).norm();
                if (r < res) {
                    res = r;
                    y_best = set->vertices[i];
                }
            }
        }
        if (res < rep.residual) {
            rep.residual = res;
            rep.witness = transfer_frechet_subgradient(x, y_best, d);
        }
    }
    rep.verified = rep.residual <= tol;
    return rep;
}

Ambient spectral_prox(const FunctionOracle& f, const SystemKind& kind, const Ambient& X, double t) {
    require_group(f.group, kind, f.name);
    if (!f.prox) throw Error(ErrorCode::Unsupported, f.name + " has no prox oracle");
    if (!(t > 0.0)) throw Error(ErrorCode::InvalidParam, "prox parameter must be > 0");
    const Vec x = spectrum(kind, X);
    return apply_isometry(decompose(kind, X), f.prox(x, t));
}

DescentResult proximal_descent(const FunctionOracle& f, const SystemKind& kind,
                               const SmoothAmbientFunction& psi, const Ambient& X0, Rng& rng,
                               double tol, int max_iter) {
    if (!f.prox) throw Error(ErrorCode::Unsupported, f.name + " has no prox oracle");
    DescentResult res;
    // Power iteration on finite-difference Hessian-vector products of Psi.
    const int n = ambient_dim(kind);
    Vec v = random_gaussian(n, rng).normalized();
    const Vec c0 = to_coords(kind, X0);
    const double eps = 1e-5 * (1.0 + c0.norm());
    double L = 0.0;
    for (int it = 0; it < 100; ++it) {
        const Ambient up = psi.grad(from_coords(kind, c0 + eps * v));
        const Ambient down = psi.grad(from_coords(kind, c0 - eps * v));
        const Vec hv = (to_coords(kind, up) - to_coords(kind, down)) / (2.0 * eps);
        const double next = hv.norm();
        if (next == 0.0) break;
        v = hv / next;
        if (std::abs(next - L) <= 1e-10 * next) {
            L = next;
            break;
        }
        L = next;
    }
    if (!(L > 0.0)) L = 1.0;
    res.lipschitz = L;
    Ambient X = X0;
    validate_ambient(kind, X);
    for (int it = 0; it < max_iter; ++it) {
        const Ambient step = X - (1.0 / L) * psi.grad(X);
        Ambient next = spectral_prox(f, kind, step, 1.0 / L);
        const double move = (next - X).norm();
        X = std::move(next);
        res.iterations = it + 1;
        if (move <= tol * (1.0 + X.norm())) {
            res.converged = true;
            break;
        }
    }
    res.X = X;
    return res;
}

} // namespace specvar
