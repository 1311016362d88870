#include <algorithm>
#include <cmath>
#include <numeric>

#include "specvar/hull.hpp"
#include "specvar/invariants.hpp"

namespace specvar {

namespace {

double active_tol(const Vec& x) { return 1e-8 * (1.0 + x.norm()); }

double positive_param(const nlohmann::json& params, const char* key) {
    if (!params.is_object() || !params.contains(key) || !params.at(key).is_number())
        throw Error(ErrorCode::InvalidParam, std::string("missing numeric parameter '") + key + "'");
    const double v = params.at(key).get<double>();
    if (!(v > 0.0) || !std::isfinite(v))
        throw Error(ErrorCode::InvalidParam, std::string("parameter '") + key + "' must be positive");
    return v;
}

SetOracle make_orthant() {
    SetOracle D;
    D.name = "orthant";
    D.group = GroupClass::Permutation;
    D.contains = [](const Vec& x, double tol) { return (x.array() >= -tol).all(); };
    D.project = [](const Vec& x) { return ProjectionSet{{x.cwiseMax(0.0)}, false}; };
    D.frechet_normal = [](const Vec& x) -> std::optional<ConeGenerators> {
        ConeGenerators c;
        const double tol = active_tol(x);
        for (Eigen::Index i = 0; i < x.size(); ++i)
            if (std::abs(x[i]) <= tol) c.rays.push_back(-Vec::Unit(x.size(), i));
        return c;
    };
    D.limiting_normal = [f = D.frechet_normal](const Vec& x) {
        return std::optional<std::vector<ConeGenerators>>({*f(x)});
    };
    return D;
}

SetOracle make_box(double r) {
    SetOracle D;
    D.name = "box";
    D.group = GroupClass::Signed;
    D.contains = [r](const Vec& x, double tol) { return x.cwiseAbs().maxCoeff() <= r + tol; };
    D.project = [r](const Vec& x) {
        return ProjectionSet{{x.cwiseMax(-r).cwiseMin(r)}, false};
    };
    D.frechet_normal = [r](const Vec& x) -> std::optional<ConeGenerators> {
        ConeGenerators c;
        const double tol = active_tol(x);
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (x[i] >= r - tol) c.rays.push_back(Vec::Unit(x.size(), i));
            if (x[i] <= -r + tol) c.rays.push_back(-Vec::Unit(x.size(), i));
        }
        return c;
    };
    D.limiting_normal = [f = D.frechet_normal](const Vec& x) {
        return std::optional<std::vector<ConeGenerators>>({*f(x)});
    };
    return D;
}

SetOracle make_sphere(double r) {
    SetOracle D;
    D.name = "sphere";
    D.group = GroupClass::Signed;
    D.closed = true;
    D.contains = [r](const Vec& x, double tol) { return std::abs(x.norm() - r) <= tol; };
    D.project = [r](const Vec& x) {
        const double n = x.norm();
        if (n == 0.0) return ProjectionSet{{r * Vec::Unit(x.size(), 0)}, true};
        return ProjectionSet{{(r / n) * x}, false};
    };
    D.frechet_normal = [](const Vec& x) -> std::optional<ConeGenerators> {
        return ConeGenerators{{x}, true};
    };
    D.limiting_normal = [](const Vec& x) {
        return std::optional<std::vector<ConeGenerators>>({ConeGenerators{{x}, true}});
    };
    return D;
}

SetOracle make_ball(double r) {
    SetOracle D;
    D.name = "ball";
    D.group = GroupClass::Signed;
    D.contains = [r](const Vec& x, double tol) { return x.norm() <= r + tol; };
    D.project = [r](const Vec& x) {
        const double n = x.norm();
        return ProjectionSet{{n <= r ? x : Vec((r / n) * x)}, false};
    };
    D.frechet_normal = [r](const Vec& x) -> std::optional<ConeGenerators> {
        ConeGenerators c;
        if (x.norm() >= r - active_tol(x)) c.rays.push_back(x);
        return c;
    };
    D.limiting_normal = [f = D.frechet_normal](const Vec& x) {
        return std::optional<std::vector<ConeGenerators>>({*f(x)});
    };
    return D;
}

std::vector<int> support_of(const Vec& x) {
    const double tol = active_tol(x);
    std::vector<int> s;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (std::abs(x[i]) > tol) s.push_back(static_cast<int>(i));
    return s;
}

ConeGenerators off_support_span(const Vec& x, const std::vector<int>& keep) {
    ConeGenerators c;
    c.linear = true;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (std::find(keep.begin(), keep.end(), static_cast<int>(i)) == keep.end())
            c.rays.push_back(Vec::Unit(x.size(), i));
    return c;
}

SetOracle make_sparse(int k) {
    SetOracle D;
    D.name = "sparse";
    D.group = GroupClass::Signed;
    D.contains = [k](const Vec& x, double tol) {
        return (x.array().abs() > tol).count() <= k;
    };
    D.project = [k](const Vec& x) {
        const Eigen::Index n = x.size();
        if (k >= n) return ProjectionSet{{x}, false};
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(),
                         [&](int a, int b) { return std::abs(x[a]) > std::abs(x[b]); });
        const double t = std::abs(x[idx[k - 1]]);
        const double tol = 1e-12 * (1.0 + x.norm());
        std::vector<int> above, tied;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (std::abs(x[i]) > t + tol)
                above.push_back(static_cast<int>(i));
            else if (std::abs(x[i]) >= t - tol)
                tied.push_back(static_cast<int>(i));
        }
        ProjectionSet out;
        const int need = k - static_cast<int>(above.size());
        if (t <= tol || static_cast<int>(tied.size()) == need) {
            Vec p = Vec::Zero(n);
            for (int i = 0; i < k; ++i) p[idx[i]] = x[idx[i]];
            out.points.push_back(p);
            return out;
        }
        // Ties at the threshold: every choice is a nearest point.
        std::vector<bool> mask(tied.size(), false);
        std::fill(mask.begin(), mask.begin() + need, true);
        do {
            Vec p = Vec::Zero(n);
            for (int i : above) p[i] = x[i];
            for (std::size_t j = 0; j < tied.size(); ++j)
                if (mask[j]) p[tied[j]] = x[tied[j]];
            out.points.push_back(p);
        } while (std::prev_permutation(mask.begin(), mask.end()));
        out.multivalued = out.points.size() > 1;
        return out;
    };
    D.frechet_normal = [k](const Vec& x) -> std::optional<ConeGenerators> {
        const auto supp = support_of(x);
        if (static_cast<int>(supp.size()) >= k && k < x.size()) return off_support_span(x, supp);
        return ConeGenerators{}; // {0}
    };
    D.limiting_normal = [k](const Vec& x) -> std::optional<std::vector<ConeGenerators>> {
        const auto supp = support_of(x);
        const int n = static_cast<int>(x.size());
        std::vector<ConeGenerators> pieces;
        if (k >= n) {
            pieces.push_back(ConeGenerators{});
            return pieces;
        }
        if (static_cast<int>(supp.size()) >= k) {
            pieces.push_back(off_support_span(x, supp));
            return pieces;
        }
        // Union over index sets J of size k containing the support.
        std::vector<int> free;
        for (int i = 0; i < n; ++i)
            if (std::find(supp.begin(), supp.end(), i) == supp.end()) free.push_back(i);
        const int need = k - static_cast<int>(supp.size());
        std::vector<bool> mask(free.size(), false);
        std::fill(mask.begin(), mask.begin() + need, true);
        do {
            std::vector<int> J = supp;
            for (std::size_t j = 0; j < free.size(); ++j)
                if (mask[j]) J.push_back(free[j]);
            pieces.push_back(off_support_span(x, J));
        } while (std::prev_permutation(mask.begin(), mask.end()));
        return pieces;
    };
    return D;
}

} // namespace

double SetOracle::distance(const Vec& x) const {
    const ProjectionSet p = project(x);
    if (p.points.empty()) throw Error(ErrorCode::NumericalFailure, name + ": empty projection");
    double best = std::numeric_limits<double>::infinity();
    for (const Vec& z : p.points) best = std::min(best, (x - z).norm());
    return best;
}

std::vector<std::string> builtin_set_names() { return {"orthant", "box", "sphere", "ball", "sparse"}; }

SetOracle builtin_set(std::string_view name, const nlohmann::json& params,
                      std::optional<SystemKind> kind) {
    SetOracle D;
    if (name == "orthant") {
        D = make_orthant();
    } else if (name == "box") {
        D = make_box(positive_param(params, "r"));
    } else if (name == "sphere") {
        D = make_sphere(positive_param(params, "r"));
    } else if (name == "ball") {
        D = make_ball(positive_param(params, "r"));
    } else if (name == "sparse") {
        const double k = positive_param(params, "k");
        if (k != std::floor(k)) throw Error(ErrorCode::InvalidParam, "sparse needs an integer k");
        D = make_sparse(static_cast<int>(k));
    } else {
        throw Error(ErrorCode::UnknownOracle, "unknown set '" + std::string(name) + "'");
    }
    if (kind) require_group(D.group, *kind, D.name);
    return D;
}

bool cone_contains(const ConeGenerators& cone, const Vec& y, double tol) {
    if (cone.rays.empty()) return y.norm() <= tol;
    Mat A(y.size(), static_cast<Eigen::Index>(cone.rays.size()));
    for (std::size_t j = 0; j < cone.rays.size(); ++j) A.col(j) = cone.rays[j];
    Vec w;
    if (cone.linear)
        w = A.completeOrthogonalDecomposition().solve(y);
    else
        w = nnls(A, y);
    return (A * w - y).norm() <= tol;
}

Vec cone_sample(const ConeGenerators& cone, int dim, Rng& rng) {
    Vec y = Vec::Zero(dim);
    std::normal_distribution<double> normal;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const Vec& r : cone.rays) y += (cone.linear ? normal(rng) : unit(rng)) * r;
    return y;
}

SetOracle epigraph_set(const FunctionOracle& f) {
    if (!f.grad) throw Error(ErrorCode::Unsupported, "epigraph projection needs a gradient");
    SetOracle D;
    D.name = "epi(" + f.name + ")";
    D.group = f.group;
    auto split = [](const Vec& v) {
        const Eigen::Index n = v.size() - 1;
        return std::make_pair(Vec(v.head(n)), v[n]);
    };
    D.contains = [f, split](const Vec& v, double tol) {
        auto [x, t] = split(v);
        return f.eval(x) <= t + tol;
    };
    D.project = [f, split](const Vec& v) {
        auto [x, t] = split(v);
        if (f.eval(x) <= t) return ProjectionSet{{v}, false};
        // The projection is active: solve z - x + (f(z) - t) grad f(z) = 0 by damped
        // Newton, with the Hessian of f taken by central differences of grad f.
        auto residual = [&](const Vec& z) -> Vec { return (z - x) + (f.eval(z) - t) * f.grad(z); };
        Vec z = x;
        const Eigen::Index n = x.size();
        const double floor = 1e-15 * (1.0 + x.norm() + std::abs(t));
        Vec r = residual(z);
        for (int it = 0; it < 200 && r.norm() > floor; ++it) {
            const Vec g = f.grad(z);
            const double excess = f.eval(z) - t;
            const double step = 1e-6 * (1.0 + z.norm());
            Mat H(n, n);
            for (Eigen::Index j = 0; j < n; ++j) {
                const Vec e = Vec::Unit(n, j);
                H.col(j) = (f.grad(z + step * e) - f.grad(z - step * e)) / (2.0 * step);
            }
            Mat J = Mat::Identity(n, n) + g * g.transpose() + std::max(excess, 0.0) * 0.5 * (H + H.transpose());
            Vec dz = J.ldlt().solve(-r);
            if (!dz.allFinite()) dz = -r;
            double a = 1.0;
            Vec next = z + dz, rn = residual(next);
            while (a > 1e-10 && !(rn.norm() < r.norm())) {
                a *= 0.5;
                next = z + a * dz;
                rn = residual(next);
            }
            if (!(rn.norm() < r.norm())) break;
            z = next;
            r = rn;
        }
        Vec p(v.size());
        p << z, std::max(f.eval(z), t);
        return ProjectionSet{{p}, false};
    };
    D.frechet_normal = [f, split](const Vec& v) -> std::optional<ConeGenerators> {
        auto [x, t] = split(v);
        ConeGenerators c;
        if (t <= f.eval(x) + active_tol(v)) {
            Vec ray(v.size());
            ray << f.grad(x), -1.0;
            c.rays.push_back(ray);
        }
        return c;
    };
    return D;
}

} // namespace specvar
