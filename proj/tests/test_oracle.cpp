#include <doctest.h>

#include <algorithm>
#include <cmath>

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

bool has_point(const std::vector<Vec>& pts, const Vec& p, double tol) {
    return std::any_of(pts.begin(), pts.end(), [&](const Vec& q) { return (q - p).norm() <= tol; });
}

const ScalarField abs1 = [](const Vec& x) { return std::abs(x[0]); };
const ScalarField negabs1 = [](const Vec& x) { return -std::abs(x[0]); };

} // namespace

TEST_CASE("finite differences") {
    const ScalarField sq = [](const Vec& x) { return x.squaredNorm(); };
    CHECK((finite_difference_gradient(sq, vec({1, 2})) - vec({2, 4})).norm() <= 1e-6);
    const ScalarField sum = [](const Vec& x) { return x.sum(); };
    CHECK((finite_difference_gradient(sum, vec({0.3, -7, 2})) - Vec::Ones(3)).norm() <= 1e-10);
    const ScalarField prod = [](const Vec& x) { return x[0] * x[1]; };
    CHECK((finite_difference_gradient(prod, vec({2, 1})) - vec({1, 2})).norm() <= 1e-8);
    const ScalarField bad = [](const Vec& x) { return x[0] > 0 ? INFINITY : 0.0; };
    CHECK_THROWS_AS(finite_difference_gradient(bad, vec({0})), Error);
}

TEST_CASE("Fréchet subgradient test is two-sided") {
    Rng rng(1);
    CHECK(frechet_subgradient_test(abs1, vec({0}), vec({0.5}), 16, rng).pass);
    CHECK_FALSE(frechet_subgradient_test(abs1, vec({0}), vec({2}), 16, rng).pass);
    const Verdict v = frechet_subgradient_test(negabs1, vec({0}), vec({0}), 16, rng);
    CHECK_FALSE(v.pass);
    CHECK(v.estimate == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("limiting subgradient test along one-sided sequences") {
    Rng rng(2);
    SequenceRecipe right;
    right.direction = vec({1});
    CHECK(limiting_subgradient_test(negabs1, vec({0}), vec({-1}), right, rng).pass);
    SequenceRecipe left;
    left.direction = vec({-1});
    CHECK(limiting_subgradient_test(negabs1, vec({0}), vec({1}), left, rng).pass);
    const Verdict z = limiting_subgradient_test(negabs1, vec({0}), vec({0}), right, rng);
    CHECK_FALSE(z.pass);
    CHECK(z.inconclusive);
}

TEST_CASE("brute_project examples") {
    const SetOracle orth = builtin_set("orthant");
    auto p = brute_project(orth.contains, vec({1, -2}), 3.0);
    CHECK(p.size() == 1);
    CHECK(has_point(p, vec({1, 0}), 1e-8));

    const SetOracle sph = builtin_set("sphere", {{"r", 1.0}});
    p = brute_project(sph.contains, vec({2, 0}), 3.0);
    CHECK(has_point(p, vec({1, 0}), 1e-7));

    const SetOracle sp = builtin_set("sparse", {{"k", 1}});
    p = brute_project(sp.contains, vec({3, -3}), 5.0);
    CHECK(has_point(p, vec({3, 0}), 1e-7));
    CHECK(has_point(p, vec({0, -3}), 1e-7));

    const MembershipTest far = [](const Vec& x, double) { return x.norm() > 100.0; };
    CHECK_THROWS_AS(brute_project(far, vec({0, 0}), 1.0), Error);
    CHECK_THROWS_AS(brute_project(orth.contains, Vec::Zero(5), 1.0), Error);
}

TEST_CASE("brute hull membership examples") {
    CHECK(brute_hull_membership(GroupClass::Permutation, vec({1, 0, 0}), vec({1.0 / 3, 1.0 / 3, 1.0 / 3})).pass);
    CHECK(brute_hull_membership(GroupClass::Signed, vec({1, 0}), vec({0, -1})).pass);
    CHECK(brute_hull_membership(GroupClass::EvenSigned, vec({1, 0}), vec({0, -1})).pass);
    const Verdict out = brute_hull_membership(GroupClass::Permutation, vec({1, 0}), vec({1, 0.5}));
    CHECK_FALSE(out.pass);
    // Nearest point of the segment [(1,0),(0,1)] to (1,0.5) is (0.75,0.25).
    CHECK(out.estimate == doctest::Approx(std::sqrt(2.0) * 0.25).epsilon(1e-9));
    CHECK_FALSE(brute_hull_membership(GroupClass::EvenSigned, vec({2, 1}), vec({2, -1})).pass);
    CHECK(brute_hull_membership(GroupClass::Signed, vec({2, 1}), vec({2, -1})).pass);
}
