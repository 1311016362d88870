#include "specvar/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace specvar {

using nlohmann::json;

Mat read_matrix(std::istream& in) {
    std::string line;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
        }
        return false;
    };
    if (!next_line()) throw Error(ErrorCode::InvalidData, "empty matrix file");
    std::istringstream head(line);
    long rows = -1, cols = -1;
    std::string extra;
    if (!(head >> rows >> cols) || (head >> extra) || rows < 1 || cols < 1)
        throw Error(ErrorCode::InvalidData, "bad header, expected \"rows cols\"");
    Mat m(rows, cols);
    for (long i = 0; i < rows; ++i) {
        if (!next_line())
            throw Error(ErrorCode::InvalidData, "expected " + std::to_string(rows) + " rows");
        std::istringstream row(line);
        for (long j = 0; j < cols; ++j) {
            std::string tok;
            if (!(row >> tok))
                throw Error(ErrorCode::InvalidData, "row " + std::to_string(i + 1) + " is short");
            std::size_t used = 0;
            double v;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                throw Error(ErrorCode::InvalidData, "not a number: " + tok);
            }
            if (used != tok.size()) throw Error(ErrorCode::InvalidData, "not a number: " + tok);
            if (!std::isfinite(v)) throw Error(ErrorCode::InvalidData, "non-finite entry: " + tok);
            m(i, j) = v;
        }
        if (row >> extra)
            throw Error(ErrorCode::InvalidData, "row " + std::to_string(i + 1) + " is long");
    }
    if (next_line()) throw Error(ErrorCode::InvalidData, "trailing data after matrix");
    return m;
}

Mat read_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidData, "cannot open " + path);
    return read_matrix(in);
}

void write_matrix(std::ostream& out, const Mat& m) {
    out << m.rows() << ' ' << m.cols() << '\n';
    out.precision(17);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out << (j ? " " : "") << m(i, j);
        out << '\n';
    }
}

Ambient ambient_from_matrix(const SystemKind& kind, const Mat& m, double xi) {
    Ambient a(m, xi);
    if (kind.cols == 1 && m.rows() == 1 && m.cols() == kind.rows) a.data = m.transpose();
    validate_ambient(kind, a);
    return a;
}

SystemKind parse_system(const std::string& name, int rows, int cols) {
    if (name == "trivial-norm") return SystemKind::trivial_norm(rows);
    if (name == "eigsym") return SystemKind::eig_sym(rows);
    if (name == "svd") return SystemKind::svd(rows, cols);
    if (name == "signed-svd") return SystemKind::signed_svd(rows);
    throw Error(ErrorCode::InvalidParam, "unknown system " + name);
}

json to_json(const Vec& v) { return json(std::vector<double>(v.begin(), v.end())); }

json to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        rows.push_back(std::move(r));
    }
    return rows;
}

json to_json(const Ambient& a) {
    json j{{"data", to_json(a.data)}};
    if (a.xi != 0.0) j["xi"] = a.xi;
    return j;
}

namespace {

const char* family_tag(Family f) {
    switch (f) {
    case Family::TrivialNorm: return "trivial-norm";
    case Family::EigSym: return "eigsym";
    case Family::Svd: return "svd";
    case Family::SignedSvd: return "signed-svd";
    }
    return "?";
}

template <class F>
auto guarded(F&& f) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw Error(ErrorCode::InvalidData, std::string("malformed JSON: ") + e.what());
    }
}

} // namespace

json to_json(const SystemKind& kind) {
    return {{"family", family_tag(kind.family)},
            {"rows", kind.rows},
            {"cols", kind.cols},
            {"product", kind.product}};
}

SystemKind kind_from_json(const json& j) {
    return guarded([&] {
        SystemKind k = parse_system(j.at("family").get<std::string>(), j.at("rows").get<int>(),
                                    j.at("cols").get<int>());
        return j.value("product", false) ? product_lift(k) : k;
    });
}

json to_json(const Decomposition& d) {
    json j{{"kind", to_json(d.kind)}, {"U", to_json(d.U)}};
    if (d.V.size() > 0) j["V"] = to_json(d.V);
    return j;
}

Vec vec_from_json(const json& j) {
    return guarded([&] {
        const auto v = j.get<std::vector<double>>();
        return Vec(Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())));
    });
}

Mat mat_from_json(const json& j) {
    return guarded([&] {
        const auto rows = j.get<std::vector<std::vector<double>>>();
        if (rows.empty()) return Mat(0, 0);
        Mat m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows[0].size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows[0].size())
                throw Error(ErrorCode::InvalidData, "ragged matrix in JSON");
            for (std::size_t k = 0; k < rows[i].size(); ++k) m(i, k) = rows[i][k];
        }
        return m;
    });
}

Decomposition decomposition_from_json(const json& j) {
    return guarded([&] {
        Decomposition d{kind_from_json(j.at("kind")), mat_from_json(j.at("U")), Mat()};
        if (j.contains("V")) d.V = mat_from_json(j.at("V"));
        return d;
    });
}

json to_json(const GroupElement& s) { return {{"perm", s.perm}, {"signs", s.signs}}; }

GroupElement group_element_from_json(const json& j) {
    return guarded([&] {
        GroupElement s{j.at("perm").get<std::vector<int>>(), j.at("signs").get<std::vector<int>>()};
        if (s.perm.size() != s.signs.size())
            throw Error(ErrorCode::InvalidData, "perm and signs differ in length");
        return s;
    });
}

json to_json(const HullCertificate& c) {
    json coeffs = json::array();
    for (const auto& [s, w] : c.coefficients) coeffs.push_back({{"element", to_json(s)}, {"weight", w}});
    json j{{"distance", c.distance},     {"coefficients", coeffs}, {"nearest", to_json(c.nearest)},
           {"gap", c.gap},               {"iterations", c.iterations},
           {"converged", c.converged}};
    j["separating_direction"] = c.separating_direction ? to_json(*c.separating_direction) : json();
    return j;
}

json to_json(const SubgradientWitness& w) {
    json j{{"base", to_json(w.base)}, {"vector", to_json(w.vector)}, {"flavor", to_string(w.flavor)}};
    if (w.invariant) {
        json prov{{"y", to_json(*w.invariant)}};
        if (w.decomposition) prov["decomposition"] = to_json(*w.decomposition);
        j["provenance"] = prov;
    }
    return j;
}

json to_json(const Verdict& v) {
    json j{{"pass", v.pass}, {"estimate", v.estimate}, {"detail", v.detail}};
    if (v.inconclusive) j["inconclusive"] = true;
    return j;
}

json to_json(const RunReport& r) {
    json records = json::array();
    for (const CheckRecord& c : r.records) {
        records.push_back({{"id", c.id},
                           {"anchor", c.anchor},
                           {"trials", c.trials},
                           {"max_violation", c.max_violation},
                           {"tolerance", c.tolerance},
                           {"pass", c.pass}});
    }
    return {{"schema", r.schema}, {"suite", r.suite},   {"seed", r.seed},
            {"records", records}, {"pass", r.pass},     {"wall_time", r.wall_time},
            {"version", r.version}};
}

RunReport report_from_json(const json& j) {
    return guarded([&] {
        RunReport r;
        r.schema = j.at("schema").get<int>();
        if (r.schema != 1) throw Error(ErrorCode::InvalidData, "unsupported report schema");
        r.suite = j.at("suite").get<std::string>();
        r.seed = j.at("seed").get<std::uint64_t>();
        for (const json& c : j.at("records")) {
            r.records.push_back({c.at("id").get<std::string>(), c.at("anchor").get<std::string>(),
                                 c.at("trials").get<long>(), c.at("max_violation").get<double>(),
                                 c.at("tolerance").get<double>(), c.at("pass").get<bool>()});
        }
        r.pass = j.at("pass").get<bool>();
        r.wall_time = j.at("wall_time").get<double>();
        r.version = j.at("version").get<std::string>();
        return r;
    });
}

} // namespace specvar
