#include <doctest.h>

#include <cmath>
#include <limits>

#include "specvar/group.hpp"
#include "specvar/majorize.hpp"

using namespace specvar;

namespace {

Vec vec(std::initializer_list<double> d) {
    Vec v(static_cast<Eigen::Index>(d.size()));
    int i = 0;
    for (double x : d) v[i++] = x;
    return v;
}

Mat diag(std::initializer_list<double> d) { return vec(d).asDiagonal(); }

} // namespace

TEST_CASE("support oracle examples") {
    const SupportValue a = support_oracle(GroupClass::Permutation, vec({1, 0}), vec({2, 5}));
    CHECK(a.value == 5.0);
    CHECK(a.maximizer.apply(vec({2, 5})) == vec({5, 2}));
    CHECK(support_oracle(GroupClass::Signed, vec({-1, 2}), vec({3, 1})).value == 7.0);
    CHECK(support_oracle(GroupClass::EvenSigned, vec({1, -1}), vec({2, 1})).value == 1.0);
}

TEST_CASE("support oracle matches enumeration") {
    Rng rng(6);
    for (GroupClass g : {GroupClass::Permutation, GroupClass::EvenSigned, GroupClass::Signed}) {
        for (int n = 1; n <= 4; ++n) {
            const auto elems = group_enumerate(g, n);
            for (int t = 0; t < 20; ++t) {
                const Vec c = random_gaussian(n, rng);
                Vec y = random_gaussian(n, rng);
                if (t % 4 == 0) y[0] = 0.0;
                double best = -std::numeric_limits<double>::infinity();
                for (const GroupElement& s : elems) best = std::max(best, c.dot(s.apply(y)));
                const SupportValue sv = support_oracle(g, c, y);
                CHECK(std::abs(sv.value - best) <= 1e-12 * (1 + c.norm() * y.norm()));
                CHECK(belongs_to(sv.maximizer, g));
                CHECK(std::abs(c.dot(sv.maximizer.apply(y)) - sv.value) <= 1e-12 * (1 + c.norm() * y.norm()));
            }
        }
    }
}

TEST_CASE("orbit hull distance examples") {
    const HullCertificate same = orbit_hull_distance(GroupClass::Permutation, vec({2, 1}), vec({2, 1}));
    CHECK(same.distance == doctest::Approx(0.0));
    REQUIRE(same.coefficients.size() == 1);
    CHECK(same.coefficients[0].first == GroupElement::identity(2));
    CHECK(same.coefficients[0].second == doctest::Approx(1.0));

    const HullCertificate mid = orbit_hull_distance(GroupClass::Permutation, vec({1, 0}), vec({0.5, 0.5}));
    CHECK(mid.distance <= 1e-9);

    const HullCertificate out = orbit_hull_distance(GroupClass::Permutation, vec({1, 0}), vec({1, 0.5}));
    CHECK(out.distance == doctest::Approx(0.25 * std::sqrt(2.0)).epsilon(1e-7));
    REQUIRE(out.separating_direction);
    CHECK(out.separating_direction->normalized().dot(vec({1, 1}).normalized()) > 0.999);
    CHECK(brute_hull_membership(GroupClass::Permutation, vec({1, 0}), vec({1, 0.5})).estimate ==
          doctest::Approx(out.distance).epsilon(1e-6));
}

TEST_CASE("hull distance agrees with enumeration") {
    Rng rng(8);
    for (GroupClass g : {GroupClass::Permutation, GroupClass::EvenSigned, GroupClass::Signed}) {
        for (int t = 0; t < 30; ++t) {
            const int n = 2 + t % 3;
            const Vec y = random_gaussian(n, rng);
            const Vec x = 0.7 * random_gaussian(n, rng);
            const HullCertificate h = orbit_hull_distance(g, y, x, 1e-9);
            const Verdict b = brute_hull_membership(g, y, x);
            CHECK(std::abs(h.distance - b.estimate) <= 1e-6);
            CHECK(h.converged);
        }
    }
}

TEST_CASE("majorization inequalities") {
    CHECK(majorization_inequalities(GroupClass::Permutation, vec({0.5, 0.5}), vec({1, 0})).pass);
    CHECK_FALSE(majorization_inequalities(GroupClass::Permutation, vec({1.1, -0.1}), vec({1, 0})).pass);
    CHECK(majorization_inequalities(GroupClass::Signed, vec({0, 1}), vec({1, 0})).pass);
    CHECK_THROWS_AS(majorization_inequalities(GroupClass::EvenSigned, vec({0, 1}), vec({1, 0})), Error);
}

TEST_CASE("Lidskii check") {
    const LidskiiReport r = lidskii_check(SystemKind::eig_sym(2), Ambient(diag({1, 0})), Ambient(diag({0, 1})));
    CHECK(r.pass);
    CHECK(r.certificate.distance <= 1e-12);
    CHECK((r.increment - vec({0, 1})).norm() < 1e-12);

    Rng rng(12);
    const SystemKind svd = SystemKind::svd(3, 2);
    const LidskiiReport s = lidskii_check(svd, random_ambient(svd, rng), random_ambient(svd, rng));
    CHECK(s.pass);
    REQUIRE(s.majorization);
    CHECK(s.majorization->pass);

    const SystemKind ss = SystemKind::signed_svd(3);
    const LidskiiReport t = lidskii_check(ss, random_ambient(ss, rng), random_ambient(ss, rng));
    CHECK(t.pass);
    CHECK(brute_hull_membership(ss, t.target, t.increment).pass);
}
