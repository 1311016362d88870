#include <doctest.h>

#include <cmath>
#include <sstream>

#include "specvar/io.hpp"

using namespace specvar;

TEST_CASE("matrix text format round trip") {
    Rng rng(1);
    const Mat m = Mat::Random(3, 2);
    std::stringstream ss;
    write_matrix(ss, m);
    CHECK(read_matrix(ss) == m);
}

TEST_CASE("malformed matrices are InvalidData") {
    for (const char* text : {"2 2\n1 0\n0 x\n", "2 2\n1 0\n", "2\n1 2\n", "2 2\n1 0 3\n0 1\n", "", "2 2\n1 nan\n0 1\n"}) {
        std::istringstream in(text);
        try {
            read_matrix(in);
            FAIL("accepted: " << std::string(text));
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InvalidData);
        }
    }
}

TEST_CASE("ambient from matrix") {
    Mat row(1, 3);
    row << 1, 2, 3;
    const Ambient a = ambient_from_matrix(SystemKind::trivial_norm(3), row);
    CHECK(a.data.rows() == 3);
    CHECK(a.data.cols() == 1);
    Mat asym(2, 2);
    asym << 1, 2, 0, 1;
    CHECK_THROWS_AS(ambient_from_matrix(SystemKind::eig_sym(2), asym), Error);
    CHECK_THROWS_AS(parse_system("hermitian", 2, 2), Error);
    CHECK(parse_system("signed-svd", 3, 3) == SystemKind::signed_svd(3));
}

TEST_CASE("json round trips") {
    Rng rng(2);
    const SystemKind k = SystemKind::svd(3, 2);
    const Decomposition d = decompose(k, random_ambient(k, rng));
    const Decomposition back = decomposition_from_json(to_json(d));
    CHECK(back.kind == k);
    CHECK(back.U == d.U);
    CHECK(back.V == d.V);
    CHECK(kind_from_json(to_json(product_lift(k))) == product_lift(k));
    GroupElement s{{1, 0, 2}, {-1, 1, -1}};
    CHECK(group_element_from_json(to_json(s)) == s);
    const Vec v = Vec::LinSpaced(4, -1.0 / 3, 7.0 / 9);
    CHECK(vec_from_json(to_json(v)) == v);
}

TEST_CASE("run report round trip") {
    RunReport r;
    r.suite = "axioms";
    r.seed = 18446744073709551615ull;
    r.records.push_back({"a.b", "anchor", 12, 1.0 / 3, 1e-9, true});
    r.records.push_back({"a.c", "other", 1, 1.7976931348623157e308, 0.0, false});
    r.pass = false;
    r.wall_time = 0.125;
    r.version = "0.1.0";
    const nlohmann::json j = to_json(r);
    CHECK(j.at("schema") == 1);
    CHECK(report_from_json(nlohmann::json::parse(j.dump())) == r);
    CHECK_THROWS_AS(report_from_json(nlohmann::json{{"schema", 2}}), Error);
}
