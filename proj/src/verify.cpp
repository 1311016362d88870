#include "specvar/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "specvar/group.hpp"
#include "specvar/majorize.hpp"
#include "specvar/oracle.hpp"

namespace specvar {

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t counter) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : stream) {
        h ^= c;
        h *= 1099511628211ull;
    }
    // splitmix64 finalizer over the combined key
    std::uint64_t z = master ^ (h + 0x9e3779b97f4a7c15ull * (counter + 1));
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

Rng trial_rng(std::uint64_t master, std::string_view stream, std::uint64_t counter) {
    return Rng(derive_seed(master, stream, counter));
}

namespace {

class Tally {
public:
    Tally(std::string id, std::string anchor, double tol)
        : id_(std::move(id)), anchor_(std::move(anchor)), tol_(tol) {}

    void observe(double violation) {
        ++trials_;
        if (std::isnan(violation)) violation = std::numeric_limits<double>::infinity();
        worst_ = std::max(worst_, violation);
        if (!(violation <= tol_)) failed_ = true;
    }
    void observe_flag(bool ok) { observe(ok ? 0.0 : 1.0); }
    long trials() const { return trials_; }

    CheckRecord record() const {
        const double shown = std::isfinite(worst_) ? worst_ : std::numeric_limits<double>::max();
        return {id_, anchor_, trials_, shown, tol_, !failed_ && trials_ > 0};
    }

private:
    std::string id_, anchor_;
    double tol_;
    long trials_ = 0;
    double worst_ = 0.0;
    bool failed_ = false;
};

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

SystemKind random_kind(int family, Rng& rng, int nmax) {
    switch (family) {
    case 0: return SystemKind::trivial_norm(uniform_int(rng, 2, nmax));
    case 1: return SystemKind::eig_sym(uniform_int(rng, 2, nmax));
    case 2: return SystemKind::svd(uniform_int(rng, 1, nmax), uniform_int(rng, 1, nmax));
    case 3: return SystemKind::signed_svd(uniform_int(rng, 2, nmax));
    default: return product_lift(random_kind(uniform_int(rng, 0, 3), rng, nmax));
    }
}

const char* family_label(int family) {
    static const char* labels[] = {"trivial_norm", "eigsym", "svd", "signed_svd", "product"};
    return labels[family];
}

Ambient random_point(const SystemKind& kind, Rng& rng, bool ties) {
    if (ties) return random_ambient_with_ties(kind, rng);
    const double scale = std::exp(std::normal_distribution<double>(0.0, 0.7)(rng));
    return random_ambient(kind, rng, scale);
}

Vec random_reduced(const SystemKind& kind, Rng& rng) {
    Vec x = random_gaussian(kind.spectrum_dim(), rng);
    // Occasionally plant repeated and zero entries.
    if (uniform_int(rng, 0, 3) == 0 && x.size() > 1) {
        x[1] = x[0];
        x[x.size() - 1] = 0.0;
    }
    return x;
}

} // namespace

// ---------------------------------------------------------------- axioms

std::vector<CheckRecord> verify_axioms(long trials, std::uint64_t seed) {
    std::vector<CheckRecord> out;
    for (int fam = 0; fam < 5; ++fam) {
        const std::string label = family_label(fam);
        Tally trace("axioms.trace_inequality." + label, "<X,Y> <= <spec(X),spec(Y)>", 1e-9);
        Tally nonexp("axioms.nonexpansive." + label, "|spec(X)-spec(Y)| <= |X-Y|", 1e-9);
        Tally recon("axioms.reconstruction." + label, "X = lift spec(X) for every spectral decomposition", 1e-8);
        Tally ordering("axioms.ordering." + label, "spec(lift x) = ord(x)", 1e-10);
        Tally adjoint("axioms.adjoint." + label, "adjoint of lift after lift = Id", 1e-12);
        Tally isometry("axioms.isometry." + label, "|lift x| = |x|", 1e-12);
        Tally norm("axioms.norm_transfer." + label, "|spec(X)| = |X|", 1e-10);
        Tally orbit("axioms.orbit." + label, "ord(s.x) = ord(x)", 0.0);
        Tally action("axioms.group_isometry." + label, "|s.x| = |x|", 1e-14);
        const std::string stream = "axioms." + label;
        for (long i = 0; i < trials; ++i) {
            Rng rng = trial_rng(seed, stream, static_cast<std::uint64_t>(i));
            const SystemKind kind = random_kind(fam, rng, 8);
            const Ambient X = random_point(kind, rng, i % 3 == 0);
            const Ambient Y = random_point(kind, rng, i % 5 == 0);
            const Vec gx = spectrum(kind, X);
            const Vec gy = spectrum(kind, Y);
            const double nx = X.norm(), ny = Y.norm();

            trace.observe(std::max(0.0, X.inner(Y) - gx.dot(gy)) / (1.0 + nx * ny));
            nonexp.observe(std::max(0.0, (gx - gy).norm() - (X - Y).norm()));
            norm.observe(std::abs(gx.norm() - nx) / (1.0 + nx));

            const auto decs = sample_decompositions(kind, X, 2, std::nullopt, rng);
            for (const Decomposition& d : decs)
                recon.observe((apply_isometry(d, gx) - X).norm() / (1.0 + nx));

            const Vec x = random_reduced(kind, rng);
            const Decomposition& d = decs.back();
            const Ambient lx = apply_isometry(d, x);
            ordering.observe((spectrum(kind, lx) - order(kind, x)).norm() / (1.0 + x.norm()));
            adjoint.observe((adjoint_apply(d, lx) - x).norm() / (1.0 + x.norm()));
            isometry.observe(std::abs(lx.norm() - x.norm()) / (1.0 + x.norm()));

            const Vec tx = order(kind, x);
            auto visit = [&](const GroupElement& s) {
                const Vec sx = s.apply(x);
                orbit.observe((order(kind, sx) - tx).cwiseAbs().maxCoeff());
                action.observe(std::abs(sx.norm() - x.norm()) / (1.0 + x.norm()));
            };
            if (group_order(kind) <= 400) {
                for (const GroupElement& s : group_enumerate(kind)) visit(s);
            } else {
                for (int k = 0; k < 16; ++k) visit(group_sample(kind, rng));
            }
        }
        for (const Tally* t : {&trace, &nonexp, &recon, &ordering, &adjoint, &isometry, &norm, &orbit,
                               &action})
            out.push_back(t->record());
    }
    return out;
}

// ----------------------------------------------------------- projections

std::vector<CheckRecord> verify_projections(long trials, std::uint64_t seed) {
    std::vector<CheckRecord> out;
    struct Pairing {
        const char* set;
        bool eig;
    };
    // The orthant is only permutation invariant, so the signed SVD group
    // pairs with the ball instead.
    const Pairing pairings[] = {{"orthant", true}, {"box", true},    {"sphere", true},
                                {"sparse", true},  {"ball", false},  {"box", false},
                                {"sphere", false}, {"sparse", false}};
    for (const Pairing& pr : pairings) {
        const std::string tag = std::string(pr.set) + "." + (pr.eig ? "eigsym" : "svd");
        Tally brute("projection.brute_distance." + tag, "d(X, preimage of D) = d_D(spec(X))", 1e-6);
        Tally dist("projection.distance." + tag, "|X - P| = d_D(spec(X))", 1e-8);
        Tally member("projection.membership." + tag, "spec(P) in D", 0.0);
        Tally shared("projection.shared_decomposition." + tag,
                     "X = lift spec(X) and P = lift spec(P)", 1e-7);
        Tally cone("projection.cone_identity." + tag, "X - P = lift (spec(X) - z)", 1e-8);
        Tally inv("projection.distance_invariance." + tag, "d_D(spec(lift x)) = d_D(x)", 1e-8);
        const std::string stream = "projection." + tag;
        for (long i = 0; i < trials; ++i) {
            Rng rng = trial_rng(seed, stream, static_cast<std::uint64_t>(i));
            const SystemKind kind = pr.eig ? SystemKind::eig_sym(uniform_int(rng, 2, 4))
                                           : SystemKind::svd(uniform_int(rng, 2, 4), uniform_int(rng, 2, 4));
            const int m = kind.group_dim();
            nlohmann::json params = nlohmann::json::object();
            const std::string name = pr.set;
            if (name == "sparse") params["k"] = uniform_int(rng, 1, m - 1);
            else if (name != "orthant") params["r"] = 1.0;
            const SetOracle D = builtin_set(name, params, kind);

            Ambient X = i % 4 == 0 ? random_ambient_with_ties(kind, rng) : random_ambient(kind, rng, 1.5);
            const Vec x = spectrum(kind, X);
            const double dx = spectral_distance(D, kind, X);
            const auto proj = spectral_project(D, kind, X, 3, rng);
            const auto elems = group_enumerate(kind);
            for (const ProjectionWitness& w : proj) {
                const double dp = (X - w.point).norm();
                dist.observe(std::abs(dp - dx));
                const Vec gp = spectrum(kind, w.point);
                member.observe_flag(D.contains(gp, 1e-9 * (1.0 + gp.norm())));
                // Some decomposition a*g^-1 in the orbit of a must lift both spectra.
                double best = std::numeric_limits<double>::infinity();
                for (const GroupElement& g : elems) {
                    const GroupElement h = g.inverse();
                    best = std::min(best, (apply_isometry(w.decomposition, h.apply(x)) - X).norm() +
                                              (apply_isometry(w.decomposition, h.apply(gp)) - w.point).norm());
                }
                shared.observe(best);
                cone.observe(((X - w.point) - apply_isometry(w.decomposition, x - w.z)).norm());
            }
            const auto nearest = brute_project(D.contains, x, x.norm() + 1.5, 4);
            const double db = (nearest.front() - x).norm();
            for (const ProjectionWitness& w : proj) brute.observe(std::abs((X - w.point).norm() - db));

            const Vec y = random_gaussian(m, rng) * 1.5;
            const Decomposition d = sample_decompositions(kind, X, 2, std::nullopt, rng).back();
            inv.observe(std::abs(D.distance(spectrum(kind, apply_isometry(d, y))) - D.distance(y)) /
                        (1.0 + y.norm()));
        }
        for (const Tally* t : {&brute, &dist, &member, &shared, &cone, &inv}) out.push_back(t->record());
    }
    return out;
}

// --------------------------------------------------------------- normals

namespace {

Vec positive_entries(int count, Rng& rng) {
    std::uniform_real_distribution<double> u(0.2, 2.0);
    Vec v(count);
    for (int i = 0; i < count; ++i) v[i] = u(rng);
    std::sort(v.begin(), v.end(), std::greater<>());
    return v;
}

} // namespace

std::vector<CheckRecord> verify_normals(long trials, std::uint64_t seed) {
    const char* cases[] = {"psd", "sphere", "rank", "epigraph"};
    std::vector<Tally> witness, planted;
    for (const char* c : cases) {
        witness.emplace_back(std::string("normal.witness.") + c,
                             "lim d(X + aY)/a = |Y| for Y = lift y, y in N_F(spec(X); D)", 1e-4);
        planted.emplace_back(std::string("normal.planted.") + c, "non-normal directions fail the limit test",
                             0.0);
    }
    for (long i = 0; i < trials; ++i) {
        const int c = static_cast<int>(i % 4);
        Rng rng = trial_rng(seed, "normal", static_cast<std::uint64_t>(i));
        SystemKind kind;
        SetOracle D;
        Ambient X;
        std::optional<FunctionOracle> f;
        if (c == 0) {
            const int n = uniform_int(rng, 2, 4);
            kind = SystemKind::eig_sym(n);
            const int pos = uniform_int(rng, 1, n);
            Vec x = Vec::Zero(n);
            x.head(pos) = positive_entries(pos, rng);
            X = apply_isometry(Decomposition{kind, haar_orthogonal(n, rng), {}}, x);
            D = builtin_set("orthant", {}, kind);
        } else if (c == 1) {
            kind = SystemKind::eig_sym(uniform_int(rng, 2, 4));
            X = random_ambient(kind, rng);
            D = builtin_set("sphere", {{"r", X.norm()}}, kind);
        } else if (c == 2) {
            kind = SystemKind::svd(uniform_int(rng, 2, 4), uniform_int(rng, 2, 4));
            const int m = kind.group_dim();
            const int k = uniform_int(rng, 1, m - 1);
            Vec x = Vec::Zero(m);
            x.head(k) = positive_entries(k, rng);
            X = apply_isometry(
                Decomposition{kind, haar_orthogonal(kind.rows, rng), haar_orthogonal(kind.cols, rng)}, x);
            D = builtin_set("sparse", {{"k", k}}, kind);
        } else {
            kind = product_lift(SystemKind::eig_sym(uniform_int(rng, 2, 4)));
            f = builtin_function("abspowsum", {{"p", i % 8 == 3 ? 3.0 : 2.0}});
            X = random_ambient(kind, rng);
            X.xi = eval_spectral(*f, inner_kind(kind), Ambient(X.data));
            D = epigraph_set(*f);
        }
        const Vec x = spectrum(kind, X);
        auto ws = spectral_normal_cone_elements(D, kind, X, 2, rng);
        if (ws.size() > 4) ws.erase(ws.begin() + 2, ws.end() - 2);
        for (const SubgradientWitness& w : ws) {
            const double ny = w.vector.norm();
            const Verdict v = frechet_normal_membership(D, kind, X, w.vector);
            witness[c].observe(std::abs(v.estimate - ny) / (1.0 + ny));

            // Planted: add a tangential component.
            const Vec& y = *w.invariant;
            Vec t = Vec::Zero(x.size());
            if (c == 0 || c == 2) {
                t[0] = 1.0;
            } else if (c == 1) {
                Vec g = random_gaussian(static_cast<int>(x.size()), rng);
                g -= g.dot(x) / x.squaredNorm() * x;
                t = g.normalized();
            } else {
                t[t.size() - 1] = -2.0 * y[y.size() - 1];
            }
            const Ambient bad = w.vector + apply_isometry(*w.decomposition, t);
            const Verdict vb = frechet_normal_membership(D, kind, X, bad);
            planted[c].observe_flag(!vb.pass);
        }
    }
    std::vector<CheckRecord> out;
    for (int c = 0; c < 4; ++c) {
        out.push_back(witness[c].record());
        out.push_back(planted[c].record());
    }
    return out;
}

// ---------------------------------------------------------- subgradients

namespace {

struct FunctionCase {
    const char* name;
    nlohmann::json params;
    bool eig;
};

const std::vector<FunctionCase>& convex_cases() {
    static const std::vector<FunctionCase> cases = {
        {"max", {}, true},         {"topk", {{"k", 2}}, true},  {"sum", {}, true},
        {"l1", {}, true},          {"sup_norm", {}, true},      {"l1", {}, false},
        {"sup_norm", {}, false},   {"abspowsum", {{"p", 1.0}}, false},
    };
    return cases;
}

} // namespace

std::vector<CheckRecord> verify_regression() {
    std::vector<CheckRecord> out;
    {
        Tally grad("regression.coordprod_gradient", "grad(phi of eigenvalues)(Diag(1,2)) = Diag(2,1)", 1e-10);
        Tally fd("regression.coordprod_finite_difference", "finite differences of phi of eigenvalues", 1e-5);
        Tally naive("regression.naive_differs", "eig(Diag(2,1)) != grad phi(2,1)", 0.0);
        const SystemKind kind = SystemKind::eig_sym(2);
        const FunctionOracle f = builtin_function("coordprod", {}, kind);
        Mat m = Mat::Zero(2, 2);
        m(0, 0) = 1.0;
        m(1, 1) = 2.0;
        const Ambient X(m);
        const Ambient G = spectral_gradient(f, kind, X);
        Mat expect = Mat::Zero(2, 2);
        expect(0, 0) = 2.0;
        expect(1, 1) = 1.0;
        grad.observe((G.data - expect).norm());
        const Vec num = finite_difference_gradient(ambient_field(f, kind), to_coords(kind, X));
        fd.observe((num - to_coords(kind, G)).norm());
        const Vec lam = spectrum(kind, Ambient(expect));
        const Vec gphi = f.grad(spectrum(kind, X));
        naive.observe_flag((lam - gphi).norm() > 0.5);
        for (const Tally* t : {&grad, &fd, &naive}) out.push_back(t->record());
    }
    return out;
}

std::vector<CheckRecord> verify_commutation(long runs, std::uint64_t seed) {
    std::vector<CheckRecord> out;
    {
        Tally wit("commutation.quadratic_residual", "-grad Psi(X) = lift y for a spectral decomposition of X", 1e-6);
        Tally comm("commutation.quadratic_commutator", "X grad Psi(X) = grad Psi(X) X", 1e-8);
        Tally l1("commutation.l1_descent_residual", "stationarity witness at a proximal-gradient limit",
                 1e-4);
        for (long i = 0; i < runs; ++i) {
            Rng rng = trial_rng(seed, "commutation", static_cast<std::uint64_t>(i));
            const SystemKind kind = SystemKind::eig_sym(uniform_int(rng, 2, 4));
            const Ambient B = random_ambient(kind, rng);
            const SmoothAmbientFunction linear{[B](const Ambient& Z) { return Z.inner(B); },
                                               [B](const Ambient&) { return B; }};
            const FunctionOracle sq = builtin_function("abspowsum", {{"p", 2.0}}, kind);
            const CommutationReport r = commutation_check(sq, kind, linear, -0.5 * B, 1e-6, 8, rng);
            wit.observe(r.residual);
            comm.observe(r.commutator.value_or(0.0));

            const SmoothAmbientFunction quad{[B](const Ambient& Z) { return 0.5 * (Z - B).inner(Z - B); },
                                             [B](const Ambient& Z) { return Z - B; }};
            const FunctionOracle l1f = builtin_function("l1", {}, kind);
            const DescentResult dr = proximal_descent(l1f, kind, quad, zero_ambient(kind), rng);
            const CommutationReport rl = commutation_check(l1f, kind, quad, dr.X, 1e-4, 8, rng);
            l1.observe(dr.converged ? rl.residual : std::numeric_limits<double>::infinity());
        }
        for (const Tally* t : {&wit, &comm, &l1}) out.push_back(t->record());
    }
    return out;
}

std::vector<CheckRecord> verify_subgradients(long trials, std::uint64_t seed) {
    std::vector<CheckRecord> out;
    constexpr int kTestTrials = 32;

    // Transferred subgradients and planted non-subgradients.
    {
        Tally pass("subgradient.transfer", "lift y in the Fréchet subdifferential of phi of spec", 1e-4);
        Tally reduced("subgradient.planted_reduced", "planted vector fails the test on the reduced space", 0.0);
        Tally planted("subgradient.planted_transfer", "planted vector still fails after transfer", 0.0);
        const auto& cases = convex_cases();
        for (long i = 0; i < trials; ++i) {
            Rng rng = trial_rng(seed, "subgradient", static_cast<std::uint64_t>(i));
            const FunctionCase& fc = cases[static_cast<std::size_t>(i) % cases.size()];
            const int n = uniform_int(rng, 2, 4);
            const SystemKind kind =
                fc.eig ? SystemKind::eig_sym(n) : SystemKind::svd(n, uniform_int(rng, 2, 4));
            const FunctionOracle f = builtin_function(fc.name, fc.params, kind);
            const Ambient X = i % 2 == 0 ? random_ambient_with_ties(kind, rng) : random_ambient(kind, rng);
            const Vec x = spectrum(kind, X);
            auto ws = frechet_subdifferential(f, kind, X, 2, rng);
            if (ws.size() > 3) ws = {ws.front(), ws[ws.size() / 2], ws.back()};
            const ScalarField phi = ambient_field(f, kind);
            const Vec c = to_coords(kind, X);
            for (const SubgradientWitness& w : ws) {
                const Verdict v = frechet_subgradient_test(phi, c, to_coords(kind, w.vector), kTestTrials, rng);
                pass.observe(std::max(0.0, -v.estimate));

                const Vec& y = *w.invariant;
                Vec bad;
                if (x.norm() > 0.0) {
                    bad = y + 0.5 * x.normalized();
                } else {
                    // At the origin: overshoot f along a unit direction, f(u) < <bad, u>.
                    const Vec u = y.norm() > 0.0 ? Vec(y.normalized()) : Vec(Vec::Unit(x.size(), 0));
                    bad = (f.eval(u) + 1.0) * u;
                }
                const Verdict vr = frechet_subgradient_test(f.eval, x, bad, kTestTrials, rng);
                reduced.observe_flag(!vr.pass);
                const Ambient lifted = apply_isometry(*w.decomposition, bad);
                const Verdict va = frechet_subgradient_test(phi, c, to_coords(kind, lifted), kTestTrials, rng);
                planted.observe_flag(!va.pass);
            }
        }
        for (const Tally* t : {&pass, &reduced, &planted}) out.push_back(t->record());
    }

    // Gradients of smooth spectral functions.
    {
        Tally fd("gradient.finite_difference", "grad(phi of spec)(X) = lift grad phi(spec(X))", 1e-5);
        Tally indep("gradient.decomposition_independence", "gradient does not depend on the spectral decomposition", 1e-8);
        const FunctionCase smooth[] = {{"abspowsum", {{"p", 2.0}}, true},
                                       {"abspowsum", {{"p", 3.0}}, false},
                                       {"coordprod", {}, true},
                                       {"sum", {}, true}};
        for (long i = 0; i < trials; ++i) {
            Rng rng = trial_rng(seed, "gradient", static_cast<std::uint64_t>(i));
            const FunctionCase& fc = smooth[i % 4];
            const int n = uniform_int(rng, 2, 4);
            const SystemKind kind =
                fc.eig ? SystemKind::eig_sym(n) : SystemKind::svd(n, uniform_int(rng, 2, 4));
            const FunctionOracle f = builtin_function(fc.name, fc.params, kind);
            const Ambient X = i % 2 == 0 ? random_ambient_with_ties(kind, rng) : random_ambient(kind, rng);
            const Ambient G = spectral_gradient(f, kind, X);
            const Vec g = to_coords(kind, G);
            const Vec num = finite_difference_gradient(ambient_field(f, kind), to_coords(kind, X));
            fd.observe((g - num).norm() / std::max(1.0, g.norm()));
            const Vec y = f.grad(spectrum(kind, X));
            for (const Decomposition& d : sample_decompositions(kind, X, 10, std::nullopt, rng))
                indep.observe((apply_isometry(d, y) - G).norm() / (1.0 + G.norm()));
        }
        out.push_back(fd.record());
        out.push_back(indep.record());
    }

    for (const CheckRecord& r : verify_regression()) out.push_back(r);
    for (const CheckRecord& r : verify_commutation(std::max(1L, trials / 10), seed)) out.push_back(r);

    // Limiting subgradients of the negated norm on the trivial system.
    {
        Tally lim("limiting.negated_norm", "lift y is a limit of nearby Fréchet subgradients", 0.0);
        Tally zero("limiting.planted_zero", "0 is not a limiting subgradient of -|.| at 0", 0.0);
        Rng rng = trial_rng(seed, "limiting", 0);
        const SystemKind kind = SystemKind::trivial_norm(2);
        const FunctionOracle f = builtin_function("negl1", {}, kind);
        const Ambient X = zero_ambient(kind);
        const ScalarField phi = ambient_field(f, kind);
        const Vec c = to_coords(kind, X);
        for (const SubgradientWitness& w : limiting_subdifferential(f, kind, X, 4, rng)) {
            const Vec y = to_coords(kind, w.vector);
            SequenceRecipe recipe;
            recipe.direction = -y;
            lim.observe_flag(limiting_subgradient_test(phi, c, y, recipe, rng).pass);
        }
        SequenceRecipe recipe;
        recipe.direction = Vec::Unit(c.size(), 0);
        const Verdict v0 = limiting_subgradient_test(phi, c, Vec::Zero(c.size()), recipe, rng);
        zero.observe_flag(!v0.pass && v0.inconclusive);
        out.push_back(lim.record());
        out.push_back(zero.record());
    }
    return out;
}

// ---------------------------------------------------------------- clarke

ClarkeOptions default_clarke_options() {
    ClarkeOptions o;
    o.radii = {1e-2, 1e-3, 1e-4};
    o.samples_per_radius = 1024;
    o.decompositions = 1024;
    return o;
}

std::vector<CheckRecord> verify_clarke(std::uint64_t seed, const ClarkeOptions& opts) {
    std::vector<CheckRecord> out;
    for (int n : {2, 3}) {
        const std::string tag = "id" + std::to_string(n);
        Tally gap("clarke.support_gap." + tag, "Clarke set of phi of spec = conv{lift y}", 5e-3);
        Tally trace("clarke.trace." + tag, "tr M = 1 on the Clarke set of the top eigenvalue", 1e-6);
        Tally psd("clarke.min_eigenvalue." + tag, "M is PSD on the Clarke set of the top eigenvalue", 1e-6);
        Rng rng = trial_rng(seed, "clarke." + tag, 0);
        const SystemKind kind = SystemKind::eig_sym(n);
        const FunctionOracle f = builtin_function("max", {}, kind);
        const Ambient X(Mat::Identity(n, n));
        const ClarkeEstimate est = clarke_subdifferential(f, kind, X, opts, rng);
        gap.observe(support_gap(kind, est.formula, est.definition, 128, rng));
        for (const HullApprox* h : {&est.formula, &est.definition}) {
            for (const Ambient& M : h->points) {
                trace.observe(std::abs(M.data.trace() - 1.0));
                Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (M.data + M.data.transpose()));
                psd.observe(std::max(0.0, -es.eigenvalues().minCoeff()));
            }
        }
        for (const Tally* t : {&gap, &trace, &psd}) out.push_back(t->record());
    }
    {
        Tally diam("clarke.smooth_diameter", "Clarke set is the gradient at smooth points", 1e-5);
        Rng rng = trial_rng(seed, "clarke.smooth", 0);
        const SystemKind kind = SystemKind::svd(2, 2);
        const FunctionOracle f = builtin_function("l1", {}, kind);
        Mat m = Mat::Zero(2, 2);
        m(0, 0) = 3.0;
        m(1, 1) = 1.0;
        ClarkeOptions o;
        o.radii = {1e-6, 1e-7};
        o.samples_per_radius = 32;
        o.decompositions = 4;
        const ClarkeEstimate est = clarke_subdifferential(f, kind, Ambient(m), o, rng);
        const Mat id = Mat::Identity(2, 2);
        for (const HullApprox* h : {&est.formula, &est.definition})
            for (const Ambient& M : h->points) diam.observe((M.data - id).norm());
        out.push_back(diam.record());
    }
    {
        Tally lip("clarke.non_lipschitz_detected", "growing difference quotients are rejected", 0.0);
        Rng rng = trial_rng(seed, "clarke.nonlip", 0);
        const SystemKind kind = SystemKind::svd(2, 2);
        const FunctionOracle f = builtin_function("abspowsum", {{"p", 0.5}}, kind);
        ClarkeOptions o;
        o.samples_per_radius = 16;
        o.decompositions = 2;
        bool detected = false;
        try {
            clarke_subdifferential(f, kind, zero_ambient(kind), o, rng);
        } catch (const Error& e) {
            detected = e.code() == ErrorCode::NotLipschitz;
        }
        lip.observe_flag(detected);
        out.push_back(lip.record());
    }
    return out;
}

// --------------------------------------------------------------- lidskii

namespace {

Vec random_hull_point(GroupClass g, const Vec& y, Rng& rng) {
    std::exponential_distribution<double> expo(1.0);
    const int k = uniform_int(rng, 1, 6);
    Vec p = Vec::Zero(y.size());
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
        const double w = expo(rng);
        p += w * group_sample(g, static_cast<int>(y.size()), rng).apply(y);
        total += w;
    }
    return p / total;
}

} // namespace

std::vector<CheckRecord> verify_lidskii(long trials, std::uint64_t seed) {
    std::vector<CheckRecord> out;
    constexpr double tol = 1e-7;
    for (int fam = 0; fam < 5; ++fam) {
        const std::string label = family_label(fam);
        Tally dist("lidskii.hull_distance." + label, "spec(X+Y) - spec(X) in conv(the orbit of spec(Y))", tol);
        Tally scalar("lidskii.scalar_inequality." + label,
                     "<spec(X+Y) - spec(X), z> <= <spec(Y), ord(z)>", 1e-9);
        Tally brute("lidskii.brute_agreement." + label, "hull solver matches orbit enumeration", 0.0);
        Tally major("lidskii.majorization_agreement." + label, "hull solver matches partial sums", 0.0);
        const std::string stream = "lidskii." + label;
        for (long i = 0; i < trials; ++i) {
            Rng rng = trial_rng(seed, stream, static_cast<std::uint64_t>(i));
            SystemKind kind = random_kind(fam == 4 ? 1 : fam, rng, 6);
            if (fam == 4) kind = product_lift(kind);
            const Ambient X = random_point(kind, rng, i % 4 == 0);
            const Ambient Y = random_point(kind, rng, i % 4 == 1);
            const LidskiiReport r = lidskii_check(kind, X, Y, tol);
            dist.observe(r.certificate.distance);
            if (r.majorization) major.observe_flag(r.verdicts_agree);
            for (int k = 0; k < 1000; ++k) {
                const Vec z = random_gaussian(kind.spectrum_dim(), rng);
                scalar.observe(std::max(0.0, r.increment.dot(z) - r.target.dot(order(kind, z))));
            }
            if (kind.group_dim() <= 4) {
                const Verdict b = brute_hull_membership(kind, r.target, r.increment);
                brute.observe_flag(b.pass == r.pass);
            }
        }
        out.push_back(dist.record());
        out.push_back(scalar.record());
        for (const Tally* t : {&brute, &major})
            if (t->trials() > 0) out.push_back(t->record());
    }

    const std::pair<GroupClass, const char*> groups[] = {{GroupClass::Permutation, "permutation"},
                                                         {GroupClass::EvenSigned, "even_signed"},
                                                         {GroupClass::Signed, "signed"}};
    for (const auto& [g, label] : groups) {
        Tally support("hull.support_exact." + std::string(label), "max_s <c, s.y> = <ord(c), ord(y)>", 1e-12);
        Tally inside("hull.inside." + std::string(label), "points of conv(S.y) have distance 0", tol);
        Tally outside("hull.outside." + std::string(label), "separated points are detected", 0.0);
        Tally agree("hull.closed_form_agreement." + std::string(label),
                    "hull verdict matches partial sums or enumeration", 0.0);
        const std::string stream = std::string("hull.") + label;
        for (long i = 0; i < trials; ++i) {
            Rng rng = trial_rng(seed, stream, static_cast<std::uint64_t>(i));
            const int n = uniform_int(rng, 2, 4);
            const Vec y = random_reduced(SystemKind::eig_sym(n), rng);
            const Vec c = random_gaussian(n, rng);
            const SupportValue sv = support_oracle(g, c, y);
            double best = -std::numeric_limits<double>::infinity();
            for (const GroupElement& s : group_enumerate(g, n)) best = std::max(best, c.dot(s.apply(y)));
            support.observe(std::abs(sv.value - best) / (1.0 + c.norm() * y.norm()));

            const Vec in = random_hull_point(g, y, rng);
            const Vec u = random_gaussian(n, rng).normalized();
            const double h = support_oracle(g, u, y).value;
            const Vec outp = in + (h + 0.1 - u.dot(in)) * u;
            const HullCertificate ci = orbit_hull_distance(g, y, in, tol);
            const HullCertificate co = orbit_hull_distance(g, y, outp, tol);
            inside.observe(ci.distance);
            bool separated = co.distance > tol && co.separating_direction.has_value();
            if (separated) {
                const Vec& sep = *co.separating_direction;
                separated = sep.dot(outp) > support_oracle(g, sep, y).value + tol / 2;
            }
            outside.observe_flag(separated);
            for (const Vec* p : {&in, &outp}) {
                const bool hull_in = orbit_hull_distance(g, y, *p, tol).distance <= tol;
                const bool closed = g == GroupClass::EvenSigned ? brute_hull_membership(g, y, *p).pass
                                                                : majorization_inequalities(g, *p, y).pass;
                agree.observe_flag(hull_in == closed);
            }
        }
        for (const Tally* t : {&support, &inside, &outside, &agree}) out.push_back(t->record());
    }
    return out;
}

// ----------------------------------------------------------------- suites

std::vector<std::string> suite_names() {
    return {"axioms", "projections", "normals", "subgradients", "clarke", "lidskii", "all"};
}

long default_trials(std::string_view suite) {
    if (suite == "axioms") return 1000;
    if (suite == "projections") return 20;
    if (suite == "normals") return 100;
    if (suite == "subgradients") return 100;
    if (suite == "lidskii") return 200;
    return 1;
}

RunReport run_suite(std::string_view suite, std::uint64_t seed, std::optional<long> trials) {
    const auto start = std::chrono::steady_clock::now();
    RunReport rep;
    rep.suite = std::string(suite);
    rep.seed = seed;
    rep.version = kVersion;
    auto run = [&](std::string_view s) {
        const long t = trials.value_or(default_trials(s));
        if (t < 1) throw Error(ErrorCode::InvalidParam, "trials must be >= 1");
        std::vector<CheckRecord> recs;
        if (s == "axioms") recs = verify_axioms(t, seed);
        else if (s == "projections") recs = verify_projections(t, seed);
        else if (s == "normals") recs = verify_normals(t, seed);
        else if (s == "subgradients") recs = verify_subgradients(t, seed);
        else if (s == "clarke") recs = verify_clarke(seed, default_clarke_options());
        else if (s == "lidskii") recs = verify_lidskii(t, seed);
        rep.records.insert(rep.records.end(), recs.begin(), recs.end());
    };
    if (suite == "all") {
        for (const std::string& s : suite_names())
            if (s != "all") run(s);
    } else {
        const auto names = suite_names();
        if (std::find(names.begin(), names.end(), suite) == names.end())
            throw Error(ErrorCode::InvalidParam, "unknown suite " + std::string(suite));
        run(suite);
    }
    rep.pass = std::all_of(rep.records.begin(), rep.records.end(), [](const CheckRecord& r) { return r.pass; });
    rep.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

} // namespace specvar
