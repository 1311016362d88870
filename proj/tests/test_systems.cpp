#include <doctest.h>

#include "specvar/group.hpp"
#include "specvar/systems.hpp"

using namespace specvar;

namespace {

Mat diag(std::initializer_list<double> d) {
    Vec v(static_cast<Eigen::Index>(d.size()));
    int i = 0;
    for (double x : d) v[i++] = x;
    return v.asDiagonal();
}

Vec vec(std::initializer_list<double> d) {
    Vec v(static_cast<Eigen::Index>(d.size()));
    int i = 0;
    for (double x : d) v[i++] = x;
    return v;
}

bool close(const Vec& a, const Vec& b, double tol = 1e-12) {
    return a.size() == b.size() && (a - b).norm() <= tol;
}

} // namespace

TEST_CASE("spectrum of diagonal inputs") {
    CHECK(close(spectrum(SystemKind::eig_sym(3), Ambient(diag({3, 1, 2}))), vec({3, 2, 1})));
    CHECK(close(spectrum(SystemKind::signed_svd(2), Ambient(diag({1, -2}))), vec({2, -1})));
    Mat r = Mat::Zero(3, 2);
    r(0, 0) = 3;
    r(1, 1) = 4;
    CHECK(close(spectrum(SystemKind::svd(3, 2), Ambient(r)), vec({4, 3})));
}

TEST_CASE("spectrum rejects bad input") {
    CHECK_THROWS_AS(spectrum(SystemKind::eig_sym(3), Ambient(Mat::Identity(2, 2))), Error);
    Mat m = Mat::Identity(2, 2);
    m(0, 1) = std::nan("");
    try {
        spectrum(SystemKind::eig_sym(2), Ambient(m));
        FAIL("expected InvalidData");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidData);
    }
}

TEST_CASE("order picks the orbit representative") {
    CHECK(close(order(SystemKind::eig_sym(3), vec({1, 3, 2})), vec({3, 2, 1})));
    CHECK(close(order(SystemKind::svd(2, 2), vec({-5, 2})), vec({5, 2})));
    CHECK(close(order(SystemKind::signed_svd(3), vec({-3, -2, -1})), vec({3, 2, -1})));

    // Brute force: the unique orbit point in the ordered cone.
    const SystemKind k = SystemKind::signed_svd(3);
    const Vec x = vec({-3, -2, -1});
    int hits = 0;
    for (const GroupElement& s : group_enumerate(k)) {
        const Vec sx = s.apply(x);
        if (in_ordered_cone(k, sx)) {
            CHECK(close(sx, order(k, x)));
            ++hits;
        }
    }
    CHECK(hits >= 1);
}

TEST_CASE("decompose reconstructs") {
    const Decomposition d = decompose(SystemKind::eig_sym(2), Ambient(diag({1, 2})));
    CHECK((apply_isometry(d, vec({2, 1})).data - diag({1, 2})).norm() < 1e-12);

    const SystemKind ss = SystemKind::signed_svd(2);
    const Decomposition e = decompose(ss, Ambient(diag({1, -2})));
    CHECK(e.U.determinant() == doctest::Approx(1.0));
    CHECK(e.V.determinant() == doctest::Approx(1.0));
    CHECK((e.U * diag({2, -1}) * e.V.transpose() - diag({1, -2})).norm() <= 1e-10);

    const SystemKind tn = SystemKind::trivial_norm(3);
    Mat x = Mat::Zero(3, 1);
    x(1, 0) = 2;
    const Decomposition t = decompose(tn, Ambient(x));
    CHECK(close(t.U.col(0), vec({0, 1, 0})));
    CHECK(close(adjoint_apply(t, Ambient(x)), vec({2})));
}

TEST_CASE("isometry and adjoint") {
    const Decomposition d{SystemKind::eig_sym(2), Mat::Identity(2, 2), {}};
    CHECK((apply_isometry(d, vec({2, 1})).data - diag({2, 1})).norm() == 0.0);
    const Decomposition s{SystemKind::svd(2, 2), Mat::Identity(2, 2), Mat::Identity(2, 2)};
    CHECK((apply_isometry(s, vec({3, 1})).data - diag({3, 1})).norm() == 0.0);
    CHECK(close(adjoint_apply(s, Ambient(diag({3, 1}))), vec({3, 1})));

    const SystemKind p = product_lift(SystemKind::eig_sym(2));
    const Decomposition dp{p, Mat::Identity(2, 2), {}};
    const Ambient lifted = apply_isometry(dp, vec({2, 1, 5}));
    CHECK(lifted.xi == 5.0);
    CHECK((lifted.data - diag({2, 1})).norm() == 0.0);
}

TEST_CASE("sample_decompositions mixes within clusters") {
    Rng rng(3);
    const SystemKind k = SystemKind::eig_sym(2);
    const Ambient id(Mat::Identity(2, 2));
    const auto ds = sample_decompositions(k, id, 3, std::nullopt, rng);
    REQUIRE(ds.size() == 3);
    for (const Decomposition& d : ds) {
        CHECK((d.U.transpose() * d.U - Mat::Identity(2, 2)).norm() < 1e-12);
        CHECK((apply_isometry(d, spectrum(k, id)) - id).norm() < 1e-12);
    }
    for (const Decomposition& d : sample_decompositions(k, Ambient(diag({2, 1})), 3, std::nullopt, rng))
        CHECK((apply_isometry(d, vec({2, 1})).data - diag({2, 1})).norm() <= 1e-10);
    const SystemKind s = SystemKind::svd(2, 2);
    for (const Decomposition& d : sample_decompositions(s, zero_ambient(s), 2, std::nullopt, rng))
        CHECK(apply_isometry(d, Vec::Zero(2)).norm() == 0.0);
}

TEST_CASE("group sizes") {
    CHECK(group_enumerate(SystemKind::eig_sym(3)).size() == 6);
    CHECK(group_enumerate(SystemKind::svd(2, 2)).size() == 8);
    const auto even = group_enumerate(SystemKind::signed_svd(2));
    CHECK(even.size() == 4);
    for (const GroupElement& s : even) CHECK(s.negative_count() % 2 == 0);
    CHECK_THROWS_AS(group_enumerate(SystemKind::eig_sym(12), 1000), Error);
}

TEST_CASE("product lift") {
    const SystemKind p = product_lift(SystemKind::eig_sym(2));
    CHECK(close(spectrum(p, Ambient(diag({1, 2}), 7.0)), vec({2, 1, 7})));
    const SystemKind ps = product_lift(SystemKind::svd(2, 2));
    const Ambient a = apply_isometry(Decomposition{ps, Mat::Identity(2, 2), Mat::Identity(2, 2)}, vec({3, 1, -1}));
    CHECK(a.xi == -1.0);
    CHECK((a.data - diag({3, 1})).norm() == 0.0);
    const SystemKind pt = product_lift(SystemKind::trivial_norm(2));
    Mat v = Mat::Zero(2, 1);
    v(1, 0) = -2;
    CHECK(close(spectrum(pt, Ambient(v, 0.0)), vec({2, 0})));
    CHECK_THROWS_AS(product_lift(p), Error);
}

TEST_CASE("trace inequality and nonexpansiveness on random pairs") {
    Rng rng(11);
    for (const SystemKind& k : {SystemKind::trivial_norm(4), SystemKind::eig_sym(4), SystemKind::svd(3, 5),
                                SystemKind::signed_svd(3)}) {
        for (int i = 0; i < 200; ++i) {
            const Ambient X = i % 2 ? random_ambient(k, rng) : random_ambient_with_ties(k, rng);
            const Ambient Y = random_ambient(k, rng);
            const Vec gx = spectrum(k, X), gy = spectrum(k, Y);
            CHECK(X.inner(Y) <= gx.dot(gy) + 1e-9 * (1 + X.norm() * Y.norm()));
            CHECK((gx - gy).norm() <= (X - Y).norm() + 1e-9);
            CHECK((apply_isometry(decompose(k, X), gx) - X).norm() <= 1e-8 * (1 + X.norm()));
        }
    }
}

TEST_CASE("isometric coordinates") {
    Rng rng(5);
    const SystemKind k = SystemKind::eig_sym(3);
    const Ambient X = random_ambient(k, rng);
    const Vec c = to_coords(k, X);
    CHECK(c.size() == ambient_dim(k));
    CHECK(c.norm() == doctest::Approx(X.norm()));
    CHECK((from_coords(k, c) - X).norm() < 1e-12);
}
