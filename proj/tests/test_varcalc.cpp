#include <doctest.h>

#include <cmath>

#include "specvar/varcalc.hpp"

using namespace specvar;

namespace {

Vec vec(std::initializer_list<double> d) {
    Vec v(static_cast<Eigen::Index>(d.size()));
    int i = 0;
    for (double x : d) v[i++] = x;
    return v;
}

Mat diag(std::initializer_list<double> d) { return vec(d).asDiagonal(); }

double min_eig(const Mat& m) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m + m.transpose()));
    return es.eigenvalues().minCoeff();
}

} // namespace

TEST_CASE("eval_spectral examples") {
    Rng rng(1);
    const SystemKind e3 = SystemKind::eig_sym(3);
    const Ambient X = random_ambient(e3, rng);
    CHECK(std::abs(eval_spectral(builtin_function("sum"), e3, X) - X.data.trace()) <= 1e-10);
    CHECK(eval_spectral(builtin_function("l1"), SystemKind::svd(2, 2), Ambient(diag({3, 1}))) ==
          doctest::Approx(4.0));
    CHECK(eval_spectral(builtin_function("coordprod"), SystemKind::eig_sym(2), Ambient(diag({1, 2}))) ==
          doctest::Approx(2.0));
}

TEST_CASE("spectral gradient examples") {
    const SystemKind e2 = SystemKind::eig_sym(2);
    const Ambient G = spectral_gradient(builtin_function("coordprod"), e2, Ambient(diag({1, 2})));
    CHECK((G.data - diag({2, 1})).norm() <= 1e-10);

    Rng rng(2);
    const SystemKind e3 = SystemKind::eig_sym(3);
    const Ambient S = spectral_gradient(builtin_function("sum"), e3, random_ambient(e3, rng));
    CHECK((S.data - Mat::Identity(3, 3)).norm() <= 1e-10);

    const SystemKind s2 = SystemKind::svd(2, 2);
    const FunctionOracle cube = builtin_function("abspowsum", {{"p", 3.0}});
    const Ambient X(diag({2, 1}));
    const Ambient C = spectral_gradient(cube, s2, X);
    CHECK((C.data - diag({12, 3})).norm() <= 1e-10);
    const Vec num = finite_difference_gradient(ambient_field(cube, s2), to_coords(s2, X));
    CHECK((num - to_coords(s2, C)).norm() <= 1e-5 * C.norm());

    try {
        spectral_gradient(builtin_function("max"), e2, Ambient(Mat::Identity(2, 2)));
        FAIL("expected NotDifferentiable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotDifferentiable);
    }
}

TEST_CASE("transferred subgradients") {
    Rng rng(3);
    const SystemKind e3 = SystemKind::eig_sym(3);
    const Mat U = haar_orthogonal(3, rng);
    const Decomposition d{e3, U, {}};
    const SubgradientWitness w = transfer_frechet_subgradient(vec({3, 3, 1}), vec({1, 0, 0}), d);
    CHECK((w.vector.data - U.col(0) * U.col(0).transpose()).norm() <= 1e-12);
    const ScalarField phi = ambient_field(builtin_function("max"), e3);
    CHECK(frechet_subgradient_test(phi, to_coords(e3, w.base), to_coords(e3, w.vector), 32, rng).pass);

    // Nuclear norm at a rank-deficient point.
    const SystemKind s2 = SystemKind::svd(2, 2);
    const Decomposition ds{s2, haar_orthogonal(2, rng), haar_orthogonal(2, rng)};
    const SubgradientWitness n = transfer_frechet_subgradient(vec({0, 2}), vec({0, 1}), ds);
    const FunctionOracle l1 = builtin_function("l1");
    const double f0 = eval_spectral(l1, s2, n.base);
    for (int i = 0; i < 1000; ++i) {
        const Ambient Z = random_ambient(s2, rng, 2.0);
        CHECK(eval_spectral(l1, s2, Z) >= f0 + (Z - n.base).inner(n.vector) - 1e-12);
    }
}

TEST_CASE("subdifferential of the top eigenvalue at the identity") {
    Rng rng(4);
    const SystemKind e2 = SystemKind::eig_sym(2);
    const auto ws = frechet_subdifferential(builtin_function("max"), e2, Ambient(Mat::Identity(2, 2)), 5, rng);
    CHECK(ws.size() >= 2);
    for (const SubgradientWitness& w : ws) {
        CHECK(w.vector.data.trace() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(min_eig(w.vector.data) >= -1e-12);
    }
}

TEST_CASE("spectral projections") {
    Rng rng(5);
    const SystemKind e2 = SystemKind::eig_sym(2);
    auto p = spectral_project(builtin_set("orthant"), e2, Ambient(diag({1, -2})), 1, rng);
    CHECK((p.front().point.data - diag({1, 0})).norm() <= 1e-12);
    CHECK(spectral_distance(builtin_set("orthant"), e2, Ambient(diag({1, -2}))) == doctest::Approx(2.0));

    const SystemKind s2 = SystemKind::svd(2, 2);
    const SetOracle rank1 = builtin_set("sparse", {{"k", 1}});
    p = spectral_project(rank1, s2, Ambient(diag({3, 1})), 1, rng);
    CHECK((p.front().point.data - diag({3, 0})).norm() <= 1e-12);
    CHECK(spectral_distance(rank1, s2, Ambient(diag({3, 1}))) == doctest::Approx(1.0));

    p = spectral_project(builtin_set("box", {{"r", 1.0}}), e2, Ambient(diag({2, -2})), 1, rng);
    CHECK((p.front().point.data - diag({1, -1})).norm() <= 1e-12);

    const Ambient Y(3.0 * random_ambient(e2, rng).data.normalized());
    CHECK(spectral_distance(builtin_set("sphere", {{"r", 1.0}}), e2, Y) == doctest::Approx(2.0));
}

TEST_CASE("Fréchet normal membership on the reduced space") {
    const SetOracle orth = builtin_set("orthant");
    CHECK(frechet_normal_membership(orth, vec({1, 0}), vec({0, -1})).pass);
    const Verdict in = frechet_normal_membership(orth, vec({1, 0}), vec({0, 1}));
    CHECK_FALSE(in.pass);
    CHECK(in.estimate == doctest::Approx(0.0).epsilon(1e-6));
    const Verdict sph = frechet_normal_membership(builtin_set("sphere", {{"r", 1.0}}), vec({1, 0}), vec({2, 0}));
    CHECK(sph.pass);
    CHECK(sph.estimate == doctest::Approx(2.0).epsilon(1e-4));
    try {
        frechet_normal_membership(orth, vec({-1, 0}), vec({0, 1}));
        FAIL("expected NotInSet");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotInSet);
    }
}

TEST_CASE("normal cone of the PSD cone") {
    Rng rng(6);
    const SystemKind e2 = SystemKind::eig_sym(2);
    const SetOracle psd = builtin_set("orthant");
    const Ambient X(diag({1, 0}));
    for (const SubgradientWitness& w : spectral_normal_cone_elements(psd, e2, X, 3, rng)) {
        CHECK(min_eig(-w.vector.data) >= -1e-12);
        CHECK(std::abs(w.vector.inner(X)) <= 1e-12);
        CHECK(frechet_normal_membership(psd, e2, X, w.vector).pass);
    }
    CHECK(frechet_normal_membership(psd, e2, X, Ambient(diag({0, -1}))).pass);
    CHECK_FALSE(frechet_normal_membership(psd, e2, X, Ambient(diag({0, 1}))).pass);

    const auto interior = spectral_normal_cone_elements(psd, e2, Ambient(diag({2, 1})), 2, rng);
    for (const SubgradientWitness& w : interior) CHECK(w.vector.norm() == 0.0);
}

TEST_CASE("sphere normals are multiples of X") {
    Rng rng(7);
    const SystemKind e3 = SystemKind::eig_sym(3);
    const Ambient X = random_ambient(e3, rng);
    const SetOracle sph = builtin_set("sphere", {{"r", X.norm()}});
    for (const SubgradientWitness& w : spectral_normal_cone_elements(sph, e3, X, 3, rng)) {
        const double t = w.vector.inner(X) / X.inner(X);
        CHECK((w.vector - t * X).norm() <= 1e-10 * (1 + w.vector.norm()));
        CHECK(frechet_normal_membership(sph, e3, X, w.vector).pass);
    }
}

TEST_CASE("epigraph normal in the product system") {
    Rng rng(8);
    const SystemKind p = product_lift(SystemKind::eig_sym(3));
    const FunctionOracle f = builtin_function("abspowsum", {{"p", 2.0}});
    Ambient X = random_ambient(p, rng);
    X.xi = eval_spectral(f, SystemKind::eig_sym(3), Ambient(X.data));
    const Ambient G = spectral_gradient(f, SystemKind::eig_sym(3), Ambient(X.data));
    const Ambient W(G.data, -1.0);
    CHECK(frechet_normal_membership(epigraph_set(f), p, X, W).pass);
    CHECK_FALSE(frechet_normal_membership(epigraph_set(f), p, X, Ambient(G.data, 1.0)).pass);
}

TEST_CASE("Clarke subdifferential of the top eigenvalue") {
    Rng rng(9);
    const SystemKind e2 = SystemKind::eig_sym(2);
    ClarkeOptions opts;
    const ClarkeEstimate est = clarke_subdifferential(builtin_function("max"), e2, Ambient(Mat::Identity(2, 2)), opts, rng);
    for (const HullApprox* h : {&est.formula, &est.definition}) {
        REQUIRE_FALSE(h->points.empty());
        for (const Ambient& M : h->points) {
            CHECK(M.data.trace() == doctest::Approx(1.0).epsilon(1e-6));
            CHECK(min_eig(M.data) >= -1e-6);
        }
    }
    CHECK(support_gap(e2, est.formula, est.definition, 128, rng) <= 0.05);
}

TEST_CASE("Clarke subdifferential at a smooth point and non-Lipschitz detection") {
    Rng rng(10);
    const SystemKind s2 = SystemKind::svd(2, 2);
    ClarkeOptions opts;
    opts.radii = {1e-6, 1e-7};
    opts.samples_per_radius = 16;
    opts.decompositions = 4;
    const ClarkeEstimate est = clarke_subdifferential(builtin_function("l1"), s2, Ambient(diag({3, 1})), opts, rng);
    for (const HullApprox* h : {&est.formula, &est.definition})
        for (const Ambient& M : h->points) CHECK((M.data - Mat::Identity(2, 2)).norm() <= 1e-5);

    ClarkeOptions small;
    small.samples_per_radius = 16;
    small.decompositions = 2;
    try {
        clarke_subdifferential(builtin_function("abspowsum", {{"p", 0.5}}), s2, zero_ambient(s2), small, rng);
        FAIL("expected NotLipschitz");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotLipschitz);
    }
}

TEST_CASE("commutation at a closed-form minimizer") {
    Rng rng(11);
    const SystemKind e3 = SystemKind::eig_sym(3);
    const Ambient B = random_ambient(e3, rng);
    const SmoothAmbientFunction linear{[B](const Ambient& Z) { return Z.inner(B); },
                                       [B](const Ambient&) { return B; }};
    const CommutationReport r =
        commutation_check(builtin_function("abspowsum", {{"p", 2.0}}), e3, linear, -0.5 * B, 1e-6, 8, rng);
    CHECK(r.verified);
    CHECK(r.residual <= 1e-6);
    REQUIRE(r.commutator);
    CHECK(*r.commutator <= 1e-8);

    const SmoothAmbientFunction quad{[B](const Ambient& Z) { return 0.5 * (Z - B).inner(Z - B); },
                                     [B](const Ambient& Z) { return Z - B; }};
    const CommutationReport z = commutation_check(builtin_function("zero"), e3, quad, B, 1e-10, 2, rng);
    CHECK(z.verified);
    const CommutationReport zf = commutation_check(builtin_function("zero"), e3, quad, 0.5 * B, 1e-10, 2, rng);
    CHECK_FALSE(zf.verified);
}

TEST_CASE("proximal descent reaches a stationary point of l1 plus a quadratic") {
    Rng rng(12);
    const SystemKind e3 = SystemKind::eig_sym(3);
    const Ambient B = random_ambient(e3, rng, 2.0);
    const SmoothAmbientFunction quad{[B](const Ambient& Z) { return 0.5 * (Z - B).inner(Z - B); },
                                     [B](const Ambient& Z) { return Z - B; }};
    const FunctionOracle l1 = builtin_function("l1");
    const DescentResult d = proximal_descent(l1, e3, quad, zero_ambient(e3), rng);
    CHECK(d.converged);
    // The minimizer soft-thresholds the eigenvalues of B.
    CHECK((d.X - spectral_prox(l1, e3, B, 1.0)).norm() <= 1e-6);
    const CommutationReport r = commutation_check(l1, e3, quad, d.X, 1e-4, 8, rng);
    CHECK(r.verified);
}
