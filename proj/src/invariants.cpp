#include "specvar/invariants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "specvar/group.hpp"

namespace specvar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double tie_tolerance(const Vec& x) { return 1e-9 * (1.0 + x.norm()); }

double sign_of(double v) { return v < 0.0 ? -1.0 : 1.0; }

double get_param(const nlohmann::json& params, const char* key, std::optional<double> fallback) {
    if (params.is_object() && params.contains(key)) {
        const auto& v = params.at(key);
        if (!v.is_number())
            throw Error(ErrorCode::InvalidParam, std::string("parameter '") + key + "' must be numeric");
        return v.get<double>();
    }
    if (!fallback)
        throw Error(ErrorCode::InvalidParam, std::string("missing parameter '") + key + "'");
    return *fallback;
}

/// All 0/1 combinations choosing `take` indices out of `pool`.
std::vector<std::vector<int>> choose(const std::vector<int>& pool, int take) {
    std::vector<std::vector<int>> out;
    const int n = static_cast<int>(pool.size());
    if (take < 0 || take > n) return out;
    std::vector<bool> mask(n, false);
    std::fill(mask.begin(), mask.begin() + take, true);
    do {
        std::vector<int> pick;
        for (int i = 0; i < n; ++i)
            if (mask[i]) pick.push_back(pool[i]);
        out.push_back(std::move(pick));
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return out;
}

/// Cartesian product of per-coordinate choices.
std::vector<Vec> product_vertices(const std::vector<std::vector<double>>& choices) {
    std::vector<Vec> out{Vec::Zero(static_cast<Eigen::Index>(choices.size()))};
    for (std::size_t i = 0; i < choices.size(); ++i) {
        std::vector<Vec> next;
        for (const Vec& v : out) {
            for (double c : choices[i]) {
                Vec w = v;
                w[static_cast<Eigen::Index>(i)] = c;
                next.push_back(std::move(w));
            }
        }
        out = std::move(next);
    }
    return out;
}

Vec soft_threshold(const Vec& x, double t) {
    Vec out(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
        out[i] = sign_of(x[i]) * std::max(std::abs(x[i]) - t, 0.0);
    return out;
}

std::optional<VertexSet> l1_subdiff(const Vec& x) {
    const double tol = tie_tolerance(x);
    std::vector<std::vector<double>> choices;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (std::abs(x[i]) <= tol)
            choices.push_back({-1.0, 1.0});
        else
            choices.push_back({sign_of(x[i])});
    }
    return VertexSet{product_vertices(choices), true};
}

std::vector<int> argmax_indices(const Vec& x) {
    const double m = x.maxCoeff();
    const double tol = tie_tolerance(x);
    std::vector<int> idx;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (x[i] >= m - tol) idx.push_back(static_cast<int>(i));
    return idx;
}

FunctionOracle make_sum() {
    FunctionOracle f;
    f.name = "sum";
    f.group = GroupClass::Permutation;
    f.convex = true;
    f.eval = [](const Vec& x) { return x.sum(); };
    f.grad = [](const Vec& x) { return Vec(Vec::Ones(x.size())); };
    f.smooth_at = [](const Vec&) { return true; };
    f.frechet_subdiff = [](const Vec& x) {
        return std::optional<VertexSet>(VertexSet{{Vec::Ones(x.size())}, true});
    };
    f.limiting_subdiff = f.frechet_subdiff;
    f.prox = [](const Vec& x, double t) { return Vec(x.array() - t); };
    return f;
}

FunctionOracle make_powsum(double p) {
    FunctionOracle f;
    f.name = "powsum";
    f.group = GroupClass::Permutation;
    f.convex = p >= 1.0;
    f.eval = [p](const Vec& x) {
        if ((x.array() < 0.0).any()) return kInf;
        return x.array().pow(p).sum();
    };
    f.smooth_at = [](const Vec& x) { return (x.array() > 0.0).all(); };
    f.grad = [p](const Vec& x) { return Vec(p * x.array().pow(p - 1.0)); };
    auto sub = [p](const Vec& x) -> std::optional<VertexSet> {
        if ((x.array() > 0.0).all()) return VertexSet{{Vec(p * x.array().pow(p - 1.0))}, true};
        return std::nullopt;
    };
    f.frechet_subdiff = sub;
    f.limiting_subdiff = sub;
    return f;
}

FunctionOracle make_abspowsum(double p) {
    FunctionOracle f;
    f.name = "abspowsum";
    f.group = GroupClass::Signed;
    f.convex = p >= 1.0;
    f.eval = [p](const Vec& x) { return x.cwiseAbs().array().pow(p).sum(); };
    auto smooth = [p](const Vec& x) { return p > 1.0 || (x.array() != 0.0).all(); };
    auto grad = [p](const Vec& x) {
        Vec g(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i)
            g[i] = x[i] == 0.0 ? 0.0 : p * std::pow(std::abs(x[i]), p - 1.0) * sign_of(x[i]);
        return g;
    };
    f.smooth_at = smooth;
    f.grad = grad;
    auto sub = [p, smooth, grad](const Vec& x) -> std::optional<VertexSet> {
        if (p == 1.0) return l1_subdiff(x);
        if (smooth(x)) return VertexSet{{grad(x)}, true};
        return std::nullopt;
    };
    f.frechet_subdiff = sub;
    f.limiting_subdiff = sub;
    if (p == 1.0) {
        f.prox = soft_threshold;
    } else if (p == 2.0) {
        f.prox = [](const Vec& x, double t) { return Vec(x / (1.0 + 2.0 * t)); };
    }
    return f;
}

FunctionOracle make_max() {
    FunctionOracle f;
    f.name = "max";
    f.group = GroupClass::Permutation;
    f.convex = true;
    f.lipschitz_radius = kInf;
    f.eval = [](const Vec& x) { return x.maxCoeff(); };
    f.smooth_at = [](const Vec& x) { return argmax_indices(x).size() == 1; };
    f.grad = [](const Vec& x) {
        Vec g = Vec::Zero(x.size());
        Eigen::Index i;
        x.maxCoeff(&i);
        g[i] = 1.0;
        return g;
    };
    f.frechet_subdiff = [](const Vec& x) -> std::optional<VertexSet> {
        VertexSet s;
        for (int i : argmax_indices(x)) s.vertices.push_back(Vec::Unit(x.size(), i));
        return s;
    };
    f.limiting_subdiff = f.frechet_subdiff;
    return f;
}

FunctionOracle make_negmin() {
    FunctionOracle f;
    f.name = "negmin";
    f.group = GroupClass::Permutation;
    f.convex = true;
    f.lipschitz_radius = kInf;
    f.eval = [](const Vec& x) { return -x.minCoeff(); };
    f.smooth_at = [](const Vec& x) { return argmax_indices(-x).size() == 1; };
    f.grad = [](const Vec& x) {
        Vec g = Vec::Zero(x.size());
        Eigen::Index i;
        x.minCoeff(&i);
        g[i] = -1.0;
        return g;
    };
    f.frechet_subdiff = [](const Vec& x) -> std::optional<VertexSet> {
        VertexSet s;
        for (int i : argmax_indices(-x)) s.vertices.push_back(-Vec::Unit(x.size(), i));
        return s;
    };
    f.limiting_subdiff = f.frechet_subdiff;
    return f;
}

/// Indices strictly above the k-th largest value, and those tied with it.
std::pair<std::vector<int>, std::vector<int>> topk_split(const Vec& x, int k) {
    if (k > x.size())
        throw Error(ErrorCode::InvalidParam, "topk: k exceeds the dimension");
    std::vector<double> sorted(x.begin(), x.end());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double t = sorted[k - 1];
    const double tol = tie_tolerance(x);
    std::vector<int> above, tied;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (x[i] > t + tol)
            above.push_back(static_cast<int>(i));
        else if (x[i] >= t - tol)
            tied.push_back(static_cast<int>(i));
    }
    return {above, tied};
}

FunctionOracle make_topk(int k) {
    FunctionOracle f;
    f.name = "topk";
    f.group = GroupClass::Permutation;
    f.convex = true;
    f.lipschitz_radius = kInf;
    f.eval = [k](const Vec& x) {
        if (k > x.size()) throw Error(ErrorCode::InvalidParam, "topk: k exceeds the dimension");
        std::vector<double> v(x.begin(), x.end());
        std::partial_sort(v.begin(), v.begin() + k, v.end(), std::greater<>());
        return std::accumulate(v.begin(), v.begin() + k, 0.0);
    };
    auto sub = [k](const Vec& x) -> std::optional<VertexSet> {
        auto [above, tied] = topk_split(x, k);
        VertexSet s;
        const int need = k - static_cast<int>(above.size());
        for (const auto& pick : choose(tied, need)) {
            Vec g = Vec::Zero(x.size());
            for (int i : above) g[i] = 1.0;
            for (int i : pick) g[i] = 1.0;
            s.vertices.push_back(std::move(g));
        }
        return s;
    };
    f.smooth_at = [sub](const Vec& x) { return sub(x)->vertices.size() == 1; };
    f.grad = [sub](const Vec& x) { return sub(x)->vertices.front(); };
    f.frechet_subdiff = sub;
    f.limiting_subdiff = sub;
    return f;
}

FunctionOracle make_l1() {
    FunctionOracle f;
    f.name = "l1";
    f.group = GroupClass::Signed;
    f.convex = true;
    f.lipschitz_radius = kInf;
    f.eval = [](const Vec& x) { return x.cwiseAbs().sum(); };
    f.smooth_at = [](const Vec& x) { return (x.array() != 0.0).all(); };
    f.grad = [](const Vec& x) {
        Vec g(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) g[i] = x[i] == 0.0 ? 0.0 : sign_of(x[i]);
        return g;
    };
    f.frechet_subdiff = l1_subdiff;
    f.limiting_subdiff = l1_subdiff;
    f.prox = soft_threshold;
    return f;
}

FunctionOracle make_sup_norm() {
    FunctionOracle f;
    f.name = "sup_norm";
    f.group = GroupClass::Signed;
    f.convex = true;
    f.lipschitz_radius = kInf;
    f.eval = [](const Vec& x) { return x.cwiseAbs().maxCoeff(); };
    auto sub = [](const Vec& x) -> std::optional<VertexSet> {
        VertexSet s;
        const Vec a = x.cwiseAbs();
        if (a.maxCoeff() <= tie_tolerance(x)) {
            for (Eigen::Index i = 0; i < x.size(); ++i) {
                s.vertices.push_back(Vec::Unit(x.size(), i));
                s.vertices.push_back(-Vec::Unit(x.size(), i));
            }
            return s;
        }
        for (int i : argmax_indices(a)) s.vertices.push_back(sign_of(x[i]) * Vec::Unit(x.size(), i));
        return s;
    };
    f.smooth_at = [sub](const Vec& x) { return sub(x)->vertices.size() == 1; };
    f.grad = [sub](const Vec& x) { return sub(x)->vertices.front(); };
    f.frechet_subdiff = sub;
    f.limiting_subdiff = sub;
    return f;
}

FunctionOracle make_coordprod() {
    FunctionOracle f;
    f.name = "coordprod";
    // An even number of sign flips leaves the product unchanged.
    f.group = GroupClass::EvenSigned;
    f.eval = [](const Vec& x) { return x.prod(); };
    f.smooth_at = [](const Vec&) { return true; };
    f.grad = [](const Vec& x) {
        Vec g(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            double p = 1.0;
            for (Eigen::Index j = 0; j < x.size(); ++j)
                if (j != i) p *= x[j];
            g[i] = p;
        }
        return g;
    };
    auto grad = f.grad;
    f.frechet_subdiff = [grad](const Vec& x) {
        return std::optional<VertexSet>(VertexSet{{grad(x)}, true});
    };
    f.limiting_subdiff = f.frechet_subdiff;
    return f;
}

FunctionOracle make_negl1() {
    FunctionOracle f;
    f.name = "negl1";
    f.group = GroupClass::Signed;
    f.lipschitz_radius = kInf;
    f.eval = [](const Vec& x) { return -x.cwiseAbs().sum(); };
    f.smooth_at = [](const Vec& x) { return (x.array() != 0.0).all(); };
    f.grad = [](const Vec& x) {
        Vec g(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) g[i] = x[i] == 0.0 ? 0.0 : -sign_of(x[i]);
        return g;
    };
    f.frechet_subdiff = [](const Vec& x) -> std::optional<VertexSet> {
        const double tol = tie_tolerance(x);
        Vec g(x.size());
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (std::abs(x[i]) <= tol) return VertexSet{{}, true}; // empty set
            g[i] = -sign_of(x[i]);
        }
        return VertexSet{{g}, true};
    };
    f.limiting_subdiff = [](const Vec& x) -> std::optional<VertexSet> {
        const double tol = tie_tolerance(x);
        std::vector<std::vector<double>> choices;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (std::abs(x[i]) <= tol)
                choices.push_back({-1.0, 1.0});
            else
                choices.push_back({-sign_of(x[i])});
        }
        return VertexSet{product_vertices(choices), false};
    };
    return f;
}

FunctionOracle make_zero() {
    FunctionOracle f;
    f.name = "zero";
    f.group = GroupClass::Signed;
    f.convex = true;
    f.lipschitz_radius = kInf;
    f.eval = [](const Vec&) { return 0.0; };
    f.smooth_at = [](const Vec&) { return true; };
    f.grad = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
    f.frechet_subdiff = [](const Vec& x) {
        return std::optional<VertexSet>(VertexSet{{Vec::Zero(x.size())}, true});
    };
    f.limiting_subdiff = f.frechet_subdiff;
    f.prox = [](const Vec& x, double) { return x; };
    return f;
}

} // namespace

bool is_smooth_point(const std::function<double(const Vec&)>& f, const Vec& x,
                     std::optional<double> step) {
    const Eigen::Index n = x.size();
    const double fx = f(x);
    if (!std::isfinite(fx)) return false;
    const double h1 = step.value_or(1e-5 * (1.0 + x.norm()));
    const double h2 = 0.1 * h1;

    auto kink = [&](const Vec& d, double h, double* slope) {
        const double right = f(x + h * d);
        const double left = f(x - h * d);
        if (!std::isfinite(right) || !std::isfinite(left)) return kInf;
        if (slope) *slope = (right - left) / (2.0 * h);
        return std::abs(right + left - 2.0 * fx) / h;
    };

    std::vector<Vec> dirs;
    for (Eigen::Index i = 0; i < n; ++i) {
        dirs.push_back(Vec::Unit(n, i));
        if (n > 1) {
            Vec d = Vec::Unit(n, i) + Vec::Unit(n, (i + 1) % n);
            dirs.push_back(d.normalized());
        }
    }
    for (const Vec& d : dirs) {
        double slope = 0.0;
        const double coarse = kink(d, h1, nullptr);
        const double fine = kink(d, h2, &slope);
        if (!std::isfinite(fine)) return false;
        if (fine <= 1e-6 * (1.0 + std::abs(slope))) continue;
        // Smooth points show a disagreement that shrinks linearly with the step.
        if (fine <= 0.5 * coarse) continue;
        return false;
    }
    return true;
}

bool is_smooth_point(const FunctionOracle& f, const Vec& x) {
    if (f.smooth_at) return f.smooth_at(x);
    return is_smooth_point(f.eval, x);
}

void require_group(GroupClass declared, const SystemKind& kind, std::string_view what) {
    if (!group_contained(group_class(kind), declared)) {
        throw Error(ErrorCode::GroupMismatch,
                    std::string(what) + " is only invariant under the " + to_string(declared) +
                        " group, but " + kind.name() + " acts by the " +
                        to_string(group_class(kind)) + " group");
    }
}

std::vector<std::string> builtin_function_names() {
    return {"sum", "powsum", "abspowsum", "max",       "negmin", "topk",
            "l1",  "sup_norm", "coordprod", "negl1", "zero"};
}

FunctionOracle builtin_function(std::string_view name, const nlohmann::json& params,
                                std::optional<SystemKind> kind) {
    FunctionOracle f;
    if (name == "sum") {
        f = make_sum();
    } else if (name == "powsum" || name == "abspowsum") {
        const double p = get_param(params, "p", std::nullopt);
        if (!(p > 0.0) || !std::isfinite(p))
            throw Error(ErrorCode::InvalidParam, "exponent p must be positive");
        f = name == "powsum" ? make_powsum(p) : make_abspowsum(p);
    } else if (name == "max") {
        f = make_max();
    } else if (name == "negmin") {
        f = make_negmin();
    } else if (name == "topk") {
        const double k = get_param(params, "k", std::nullopt);
        if (k < 1.0 || k != std::floor(k))
            throw Error(ErrorCode::InvalidParam, "topk needs an integer k >= 1");
        if (kind && k > kind->spectrum_dim())
            throw Error(ErrorCode::InvalidParam, "topk: k exceeds the dimension");
        f = make_topk(static_cast<int>(k));
    } else if (name == "l1") {
        f = make_l1();
    } else if (name == "sup_norm") {
        f = make_sup_norm();
    } else if (name == "coordprod") {
        f = make_coordprod();
    } else if (name == "negl1") {
        f = make_negl1();
    } else if (name == "zero") {
        f = make_zero();
    } else {
        throw Error(ErrorCode::UnknownOracle, "unknown function '" + std::string(name) + "'");
    }
    if (kind) require_group(f.group, *kind, f.name);
    return f;
}

std::pair<std::string, nlohmann::json> parse_registry_spec(std::string_view spec) {
    const auto colon = spec.find(':');
    std::string name(spec.substr(0, colon));
    nlohmann::json params = nlohmann::json::object();
    if (colon == std::string_view::npos) return {name, params};
    std::string_view rest = spec.substr(colon + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const std::string_view item = rest.substr(0, comma);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw Error(ErrorCode::InvalidParam, "expected key=value in '" + std::string(item) + "'");
        const std::string key(item.substr(0, eq));
        const std::string value(item.substr(eq + 1));
        try {
            std::size_t used = 0;
            const double v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
            params[key] = v;
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidParam, "non-numeric value for '" + key + "'");
        }
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
    }
    return {name, params};
}

namespace {

double violation(double a, double b) {
    if (std::isinf(a) && std::isinf(b) && (a > 0) == (b > 0)) return 0.0;
    return std::abs(a - b);
}

Vec random_point_for(const SystemKind& kind, Rng& rng) {
    return random_gaussian(kind.spectrum_dim(), rng);
}

} // namespace

InvarianceReport check_invariance(const FunctionOracle& f, const SystemKind& kind, int trials,
                                  Rng& rng) {
    InvarianceReport r;
    r.trials = trials;
    for (int t = 0; t < trials; ++t) {
        const Vec x = random_point_for(kind, rng);
        const double fx = f.eval(x);
        const GroupElement s = group_sample(kind, rng);
        r.max_group_violation = std::max(r.max_group_violation, violation(f.eval(s.apply(x)), fx));
        const Decomposition d = decompose(kind, random_ambient(kind, rng));
        const Vec through = spectrum(kind, apply_isometry(d, x));
        r.max_decomposition_violation =
            std::max(r.max_decomposition_violation, violation(f.eval(through), fx));
    }
    r.max_violation = std::max(r.max_group_violation, r.max_decomposition_violation);
    return r;
}

InvarianceReport check_invariance(const SetOracle& D, const SystemKind& kind, int trials,
                                  Rng& rng) {
    InvarianceReport r;
    r.trials = trials;
    for (int t = 0; t < trials; ++t) {
        // Probe near the set so membership is not trivially false.
        const Vec x0 = random_point_for(kind, rng);
        const auto proj = D.project(x0);
        const Vec x = proj.points.front();
        const double tol = 1e-9 * (1.0 + x.norm());
        const GroupElement s = group_sample(kind, rng);
        const bool in = D.contains(x, tol);
        r.max_group_violation =
            std::max(r.max_group_violation, in == D.contains(s.apply(x), tol) ? 0.0 : 1.0);
        r.max_group_violation =
            std::max(r.max_group_violation, std::abs(D.distance(s.apply(x0)) - D.distance(x0)));
    }
    r.max_violation = r.max_group_violation;
    return r;
}

} // namespace specvar
