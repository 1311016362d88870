#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "specvar/group.hpp"
#include "specvar/majorize.hpp"
#include "specvar/oracle.hpp"
#include "specvar/systems.hpp"
#include "specvar/varcalc.hpp"

namespace specvar {

/// Text format: a "rows cols" header line, then rows of whitespace-separated
/// decimals. Parse errors throw Error(InvalidData).
Mat read_matrix(std::istream& in);
Mat read_matrix_file(const std::string& path);
void write_matrix(std::ostream& out, const Mat& m);

/// Reshapes a parsed matrix into an ambient point of `kind` (vectors may be
/// given as a row or a column) and validates it.
Ambient ambient_from_matrix(const SystemKind& kind, const Mat& m, double xi = 0.0);

/// "trivial-norm", "eigsym", "svd", "signed-svd" with the given shape.
SystemKind parse_system(const std::string& name, int rows, int cols);

nlohmann::json to_json(const Vec& v);
nlohmann::json to_json(const Mat& m);
nlohmann::json to_json(const Ambient& a);
nlohmann::json to_json(const SystemKind& kind);
nlohmann::json to_json(const Decomposition& d);
nlohmann::json to_json(const GroupElement& s);
nlohmann::json to_json(const HullCertificate& c);
nlohmann::json to_json(const SubgradientWitness& w);
nlohmann::json to_json(const Verdict& v);

Vec vec_from_json(const nlohmann::json& j);
Mat mat_from_json(const nlohmann::json& j);
SystemKind kind_from_json(const nlohmann::json& j);
Decomposition decomposition_from_json(const nlohmann::json& j);
GroupElement group_element_from_json(const nlohmann::json& j);

struct CheckRecord {
    std::string id;
    std::string anchor;
    long trials = 0;
    double max_violation = 0.0;
    double tolerance = 0.0;
    bool pass = false;
    bool operator==(const CheckRecord&) const = default;
};

struct RunReport {
    int schema = 1;
    std::string suite;
    std::uint64_t seed = 0;
    std::vector<CheckRecord> records;
    bool pass = false;
    double wall_time = 0.0;
    std::string version;
    bool operator==(const RunReport&) const = default;
};

nlohmann::json to_json(const RunReport& r);
RunReport report_from_json(const nlohmann::json& j);

} // namespace specvar
