#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "specvar/invariants.hpp"
#include "specvar/oracle.hpp"
#include "specvar/systems.hpp"

namespace specvar {

enum class Flavor { Frechet, Limiting, Clarke, Gradient, Normal, LimitingNormal };
std::string to_string(Flavor f);

/// One element of a transferred set: vector = Lambda_a y at base = Lambda_a x.
struct SubgradientWitness {
    Ambient base;
    Ambient vector;
    Flavor flavor = Flavor::Frechet;
    std::optional<Vec> invariant;          ///< y
    std::optional<Decomposition> decomposition;
};

/// phi(gamma(X))
double eval_spectral(const FunctionOracle& f, const SystemKind& kind, const Ambient& X);

/// Phi as a field over the isometric coordinates of the ambient space.
ScalarField ambient_field(const FunctionOracle& f, const SystemKind& kind);

/// Lambda_a grad phi(gamma(X)); NotDifferentiable when gamma(X) is a kink.
Ambient spectral_gradient(const FunctionOracle& f, const SystemKind& kind, const Ambient& X,
                          std::optional<double> tie_tol = std::nullopt);

SubgradientWitness transfer_frechet_subgradient(const Vec& x, const Vec& y, const Decomposition& d);

/// Lambda_a y over the oracle's vertices (plus one random convex combination
/// per decomposition when the set is a hull) and `samples` members of A_X.
std::vector<SubgradientWitness> frechet_subdifferential(const FunctionOracle& f,
                                                        const SystemKind& kind, const Ambient& X,
                                                        int samples, Rng& rng,
                                                        std::optional<double> tie_tol = std::nullopt);
std::vector<SubgradientWitness> limiting_subdifferential(const FunctionOracle& f,
                                                         const SystemKind& kind, const Ambient& X,
                                                         int samples, Rng& rng,
                                                         std::optional<double> tie_tol = std::nullopt);

struct ProjectionWitness {
    Ambient point;
    Vec z;           ///< nearest point of D to gamma(X)
    Decomposition decomposition;
    bool multivalued = false;
};

std::vector<ProjectionWitness> spectral_project(const SetOracle& D, const SystemKind& kind,
                                                const Ambient& X, int count, Rng& rng);
double spectral_distance(const SetOracle& D, const SystemKind& kind, const Ambient& X);

struct LimitSchedule {
    double alpha0 = 1e-2;
    double ratio = 0.5;
    int steps = 20;
};

/// Tests y in N_F(x; D) through lim d_D(x + a y) / a = |y|.
Verdict frechet_normal_membership(const ScalarField& dist, const Vec& x, const Vec& y,
                                  const LimitSchedule& schedule = {});
Verdict frechet_normal_membership(const SetOracle& D, const Vec& x, const Vec& y,
                                  const LimitSchedule& schedule = {});
/// Ambient version with d = spectral_distance.
Verdict frechet_normal_membership(const SetOracle& D, const SystemKind& kind, const Ambient& X,
                                  const Ambient& Y, const LimitSchedule& schedule = {});

/// Lambda_a y for y drawn from the Fréchet normal cone of D at gamma(X).
std::vector<SubgradientWitness> spectral_normal_cone_elements(const SetOracle& D,
                                                              const SystemKind& kind,
                                                              const Ambient& X, int count, Rng& rng);
/// Same for the limiting normal cone (union of cones).
std::vector<SubgradientWitness> spectral_limiting_normal_elements(const SetOracle& D,
                                                                  const SystemKind& kind,
                                                                  const Ambient& X, int count,
                                                                  Rng& rng);

struct HullApprox {
    std::vector<Ambient> points;
    bool convex_hull = true;
};

struct ClarkeOptions {
    std::vector<double> radii{1e-2, 1e-3, 1e-4};
    int samples_per_radius = 64;
    /// Members of A_X used on the formula side per sampled gradient.
    int decompositions = 64;
};

struct ClarkeEstimate {
    HullApprox formula;     ///< conv{Lambda_a y : y sampled Clarke gradients of phi}
    HullApprox definition;  ///< sampled gradients of Phi near X
    double lipschitz_outer = 0.0;  ///< difference-quotient bound at the largest radius
    double lipschitz_inner = 0.0;  ///< same at the smallest radius
};

/// Gradient sampling on both sides. Throws NotLipschitz when difference
/// quotients grow by more than 4x between the outer and inner radius.
ClarkeEstimate clarke_subdifferential(const FunctionOracle& f, const SystemKind& kind,
                                      const Ambient& X, const ClarkeOptions& opts, Rng& rng);

/// max over random unit directions u of |h_A(u) - h_B(u)| with h the support function.
double support_gap(const SystemKind& kind, const HullApprox& A, const HullApprox& B,
                   int directions, Rng& rng);

struct SmoothAmbientFunction {
    std::function<double(const Ambient&)> eval;
    std::function<Ambient(const Ambient&)> grad;
};

struct CommutationReport {
    bool verified = false;
    /// min over sampled a of dist(-grad Psi(X), conv{Lambda_a y}).
    double residual = 0.0;
    /// |X G - G X| with G = grad Psi(X) (EigSym only).
    std::optional<double> commutator;
    std::optional<SubgradientWitness> witness;
};

CommutationReport commutation_check(const FunctionOracle& f, const SystemKind& kind,
                                    const SmoothAmbientFunction& psi, const Ambient& X, double tol,
                                    int samples, Rng& rng);

/// prox of t * phi(gamma(.)) at X, Lambda_a prox_{t phi}(gamma(X)).
Ambient spectral_prox(const FunctionOracle& f, const SystemKind& kind, const Ambient& X, double t);

struct DescentResult {
    Ambient X;
    int iterations = 0;
    double lipschitz = 0.0;
    bool converged = false;
};

/// Proximal gradient on Phi + Psi with step 1/L, L from power iteration on the
/// Hessian of Psi.
DescentResult proximal_descent(const FunctionOracle& f, const SystemKind& kind,
                               const SmoothAmbientFunction& psi, const Ambient& X0, Rng& rng,
                               double tol = 1e-8, int max_iter = 100000);

} // namespace specvar
