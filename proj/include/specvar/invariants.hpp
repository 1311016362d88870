#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "specvar/systems.hpp"

namespace specvar {

/// A finite vertex list standing for a subdifferential set. When
/// `convex_hull` is set the set is the convex hull of the vertices; an empty
/// list stands for the empty set.
struct VertexSet {
    std::vector<Vec> vertices;
    bool convex_hull = true;
};

/// Evaluators for a group-invariant function on the reduced space.
/// Optional members are empty std::function objects when unavailable.
struct FunctionOracle {
    std::string name;
    GroupClass group = GroupClass::Permutation;
    bool convex = false;
    std::optional<double> lipschitz_radius;

    std::function<double(const Vec&)> eval;
    /// Gradient at points where the function is differentiable.
    std::function<Vec(const Vec&)> grad;
    /// Analytic smoothness predicate; falls back to is_smooth_point when empty.
    std::function<bool(const Vec&)> smooth_at;
    /// Returns nullopt when the set is not finitely representable at x.
    std::function<std::optional<VertexSet>(const Vec&)> frechet_subdiff;
    std::function<std::optional<VertexSet>(const Vec&)> limiting_subdiff;
    /// prox_{t f}(x)
    std::function<Vec(const Vec&, double)> prox;
};

/// Nonsmooth-locus probe: one-sided difference quotients along 2*dim
/// directions must agree, or their disagreement must shrink with the step.
bool is_smooth_point(const std::function<double(const Vec&)>& f, const Vec& x,
                     std::optional<double> step = std::nullopt);
bool is_smooth_point(const FunctionOracle& f, const Vec& x);

/// Builtin registry: sum, powsum(p), abspowsum(p), max, negmin, topk(k), l1,
/// sup_norm, coordprod, negl1, zero. When `kind` is given the function must be
/// invariant under its group (GroupMismatch otherwise).
FunctionOracle builtin_function(std::string_view name, const nlohmann::json& params = {},
                                std::optional<SystemKind> kind = std::nullopt);
std::vector<std::string> builtin_function_names();

/// Throws GroupMismatch unless `declared` contains the group of `kind`.
void require_group(GroupClass declared, const SystemKind& kind, std::string_view what);

struct ProjectionSet {
    std::vector<Vec> points;
    bool multivalued = false;
};

/// Cone generated by `rays` (nonnegative combinations, or the linear span
/// when `linear`). No rays means the cone {0}.
struct ConeGenerators {
    std::vector<Vec> rays;
    bool linear = false;
};

bool cone_contains(const ConeGenerators& cone, const Vec& y, double tol);
/// Random element of the cone (nonnegative or Gaussian combination of rays).
Vec cone_sample(const ConeGenerators& cone, int dim, Rng& rng);

struct SetOracle {
    std::string name;
    GroupClass group = GroupClass::Signed;
    bool closed = true;

    std::function<bool(const Vec&, double)> contains;
    std::function<ProjectionSet(const Vec&)> project;
    /// Fréchet normal cone at a point of the set.
    std::function<std::optional<ConeGenerators>(const Vec&)> frechet_normal;
    /// Limiting normal cone as a finite union of cones.
    std::function<std::optional<std::vector<ConeGenerators>>(const Vec&)> limiting_normal;

    double distance(const Vec& x) const;
};

/// Builtin sets: orthant, box(r), sphere(r), ball(r), sparse(k).
SetOracle builtin_set(std::string_view name, const nlohmann::json& params = {},
                      std::optional<SystemKind> kind = std::nullopt);
std::vector<std::string> builtin_set_names();

/// Epigraph {(x, t) : f(x) <= t} as a set on the reduced space of the lifted
/// system. Requires f.grad; projection is computed by Newton's method.
SetOracle epigraph_set(const FunctionOracle& f);

/// "name:key=value,key=value" -> (name, params)
std::pair<std::string, nlohmann::json> parse_registry_spec(std::string_view spec);

struct InvarianceReport {
    int trials = 0;
    double max_violation = 0.0;
    double max_group_violation = 0.0;
    double max_decomposition_violation = 0.0;
};

/// Randomized check of f(s.x) = f(x) and f(gamma(Lambda_a x)) = f(x).
InvarianceReport check_invariance(const FunctionOracle& f, const SystemKind& kind, int trials,
                                  Rng& rng);
InvarianceReport check_invariance(const SetOracle& D, const SystemKind& kind, int trials,
                                  Rng& rng);

} // namespace specvar
