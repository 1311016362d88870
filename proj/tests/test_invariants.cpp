#include <doctest.h>

#include <algorithm>

#include "specvar/invariants.hpp"
#include "specvar/oracle.hpp"

using namespace specvar;

namespace {

Vec vec(std::initializer_list<double> d) {
    Vec v(static_cast<Eigen::Index>(d.size()));
    int i = 0;
    for (double x : d) v[i++] = x;
    return v;
}

bool has_point(const std::vector<Vec>& pts, const Vec& p) {
    return std::any_of(pts.begin(), pts.end(), [&](const Vec& q) { return (q - p).norm() < 1e-12; });
}

} // namespace

TEST_CASE("coordprod values and gradient") {
    const FunctionOracle f = builtin_function("coordprod");
    CHECK(f.eval(vec({2, 1})) == 2.0);
    CHECK((f.grad(vec({2, 1})) - vec({1, 2})).norm() == 0.0);
}

TEST_CASE("abspowsum(2) is the squared norm") {
    const FunctionOracle f = builtin_function("abspowsum", {{"p", 2.0}});
    const Vec x = vec({1.5, -2, 0.25});
    CHECK(f.eval(x) == doctest::Approx(x.squaredNorm()));
    CHECK((f.grad(x) - 2 * x).norm() < 1e-14);
}

TEST_CASE("max subdifferential at a tie") {
    const FunctionOracle f = builtin_function("max");
    const auto vs = f.frechet_subdiff(vec({3, 3, 1}));
    REQUIRE(vs);
    CHECK(vs->convex_hull);
    CHECK(vs->vertices.size() == 2);
    CHECK(has_point(vs->vertices, vec({1, 0, 0})));
    CHECK(has_point(vs->vertices, vec({0, 1, 0})));
    Rng rng(1);
    for (const Vec& y : vs->vertices) CHECK(frechet_subgradient_test(f.eval, vec({3, 3, 1}), y, 64, rng).pass);
}

TEST_CASE("negated absolute value has two limiting subgradients at 0") {
    const FunctionOracle f = builtin_function("negl1");
    const auto vs = f.limiting_subdiff(vec({0}));
    REQUIRE(vs);
    CHECK_FALSE(vs->convex_hull);
    CHECK(has_point(vs->vertices, vec({1})));
    CHECK(has_point(vs->vertices, vec({-1})));
    const auto fr = f.frechet_subdiff(vec({0}));
    CHECK((!fr || fr->vertices.empty()));
}

TEST_CASE("invalid parameters and unknown names") {
    CHECK_THROWS_AS(builtin_function("abspowsum", {{"p", -1.0}}), Error);
    CHECK_THROWS_AS(builtin_function("topk", {{"k", 0}}, SystemKind::eig_sym(3)), Error);
    try {
        builtin_function("nosuch");
        FAIL("expected UnknownOracle");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UnknownOracle);
    }
    try {
        builtin_function("coordprod", {}, SystemKind::svd(2, 2));
        FAIL("expected GroupMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GroupMismatch);
    }
}

TEST_CASE("builtin set examples") {
    const SetOracle orth = builtin_set("orthant");
    const ProjectionSet p = orth.project(vec({1, -2}));
    CHECK(p.points.size() == 1);
    CHECK(has_point(p.points, vec({1, 0})));

    const SetOracle sp = builtin_set("sparse", {{"k", 1}});
    const ProjectionSet q = sp.project(vec({3, -3}));
    CHECK(q.multivalued);
    CHECK(q.points.size() == 2);
    CHECK(has_point(q.points, vec({3, 0})));
    CHECK(has_point(q.points, vec({0, -3})));

    CHECK(builtin_set("sphere", {{"r", 1.0}}).contains(vec({0.6, 0.8}), 1e-12));
    CHECK_THROWS_AS(builtin_set("ball", {{"r", -1.0}}), Error);
}

TEST_CASE("projections agree with brute force") {
    Rng rng(9);
    for (const char* name : {"orthant", "box", "sphere", "ball", "sparse"}) {
        nlohmann::json params = nlohmann::json::object();
        if (std::string(name) == "sparse") params["k"] = 2;
        else if (std::string(name) != "orthant") params["r"] = 1.0;
        const SetOracle D = builtin_set(name, params);
        for (int i = 0; i < 3; ++i) {
            const Vec x = 1.5 * random_gaussian(3, rng);
            const ProjectionSet ps = D.project(x);
            const double d = (ps.points.front() - x).norm();
            for (const Vec& p : ps.points) {
                CHECK(D.contains(p, 1e-9));
                CHECK(std::abs((p - x).norm() - d) < 1e-12);
            }
            const auto bp = brute_project(D.contains, x, x.norm() + 1.5, 4);
            CHECK(std::abs((bp.front() - x).norm() - d) <= 1e-6);
        }
    }
}

TEST_CASE("check_invariance") {
    Rng rng(2);
    const InvarianceReport a =
        check_invariance(builtin_function("abspowsum", {{"p", 0.5}}), SystemKind::svd(3, 3), 100, rng);
    CHECK(a.max_violation <= 1e-12);
    const InvarianceReport s = check_invariance(builtin_function("sum"), SystemKind::eig_sym(3), 100, rng);
    CHECK(s.max_violation <= 1e-12);
    const InvarianceReport c = check_invariance(builtin_function("coordprod"), SystemKind::svd(2, 2), 100, rng);
    CHECK(c.max_violation > 0.1);
}

TEST_CASE("provided gradients match finite differences") {
    Rng rng(4);
    for (const char* name : {"sum", "abspowsum", "coordprod", "max", "l1"}) {
        const FunctionOracle f = builtin_function(name, std::string(name) == "abspowsum"
                                                            ? nlohmann::json{{"p", 3.0}}
                                                            : nlohmann::json::object());
        for (int i = 0; i < 20; ++i) {
            const Vec x = random_gaussian(4, rng);
            if (!is_smooth_point(f, x)) continue;
            const Vec g = f.grad(x);
            const Vec num = finite_difference_gradient(f.eval, x);
            CHECK((g - num).norm() <= 1e-5 * std::max(1.0, g.norm()));
        }
    }
}

TEST_CASE("registry spec parsing") {
    const auto [name, params] = parse_registry_spec("sparse:k=1");
    CHECK(name == "sparse");
    CHECK(params.at("k").get<double>() == 1.0);
    const auto [n2, p2] = parse_registry_spec("box:r=2.5");
    CHECK(n2 == "box");
    CHECK(p2.at("r").get<double>() == 2.5);
    CHECK_THROWS_AS(parse_registry_spec("box:r"), Error);
}
