#include <doctest.h>

#include <set>

#include "specvar/verify.hpp"

using namespace specvar;

TEST_CASE("derived seeds are stable and distinct") {
    CHECK(derive_seed(1, "axioms", 0) == derive_seed(1, "axioms", 0));
    std::set<std::uint64_t> seen;
    for (std::uint64_t m : {0ull, 1ull, 2ull})
        for (const char* s : {"axioms", "lidskii", "normal"})
            for (std::uint64_t c = 0; c < 10; ++c) seen.insert(derive_seed(m, s, c));
    CHECK(seen.size() == 90);
}

TEST_CASE("small suites pass and are deterministic") {
    const RunReport a = run_suite("axioms", 3, 20);
    CHECK(a.pass);
    RunReport b = run_suite("axioms", 3, 20);
    b.wall_time = a.wall_time;
    CHECK(a == b);
    CHECK(run_suite("lidskii", 3, 5).pass);
    CHECK(run_suite("normals", 3, 8).pass);
}

TEST_CASE("unknown suite and bad trial counts") {
    CHECK_THROWS_AS(run_suite("nosuch", 1), Error);
    CHECK_THROWS_AS(run_suite("axioms", 1, 0), Error);
}

TEST_CASE("every record names a check and an anchor") {
    for (const CheckRecord& r : run_suite("subgradients", 5, 8).records) {
        CHECK_FALSE(r.id.empty());
        CHECK_FALSE(r.anchor.empty());
        CHECK(r.trials > 0);
    }
}
