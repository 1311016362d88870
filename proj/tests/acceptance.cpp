// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "specvar/verify.hpp"

using namespace specvar;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

Outcome judge(const std::vector<CheckRecord>& records, const std::string& prefix = "") {
    Outcome o;
    int used = 0;
    for (const CheckRecord& r : records) {
        if (r.id.rfind(prefix, 0) != 0) continue;
        ++used;
        if (!r.pass) {
            o.pass = false;
            std::ostringstream s;
            s << " [" << r.id << " max_violation=" << r.max_violation << " tol=" << r.tolerance << "]";
            o.detail += s.str();
        }
    }
    if (used == 0) {
        o.pass = false;
        o.detail = " [no records for " + prefix + "]";
    } else if (o.pass) {
        o.detail = " [" + std::to_string(used) + " checks]";
    }
    return o;
}

std::vector<CheckRecord> select(const std::vector<CheckRecord>& all, const std::vector<std::string>& prefixes) {
    std::vector<CheckRecord> out;
    for (const CheckRecord& r : all)
        for (const std::string& p : prefixes)
            if (r.id.rfind(p, 0) == 0) out.push_back(r);
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

Outcome determinism() {
    Outcome o;
    const std::string cli = SPECVAR_CLI;
    std::string texts[2];
    for (int i = 0; i < 2; ++i) {
        const std::string out = "acceptance_report_" + std::to_string(i) + ".json";
        const std::string cmd = "\"" + cli + "\" verify --suite all --seed 1 --out " + out + " 2>/dev/null";
        const int rc = std::system(cmd.c_str());
        if (rc != 0) {
            o.pass = false;
            o.detail += " [run " + std::to_string(i) + " exit status " + std::to_string(rc) + "]";
        }
        nlohmann::json j = nlohmann::json::parse(read_file(out), nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            o.pass = false;
            o.detail += " [run " + std::to_string(i) + " produced no JSON]";
            continue;
        }
        j.erase("wall_time");
        texts[i] = j.dump();
    }
    if (texts[0].empty() || texts[0] != texts[1]) {
        o.pass = false;
        o.detail += " [reports differ]";
    }
    if (o.pass) o.detail = " [" + std::to_string(texts[0].size()) + " bytes identical]";
    return o;
}

} // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::uint64_t seed = 1;
    const std::vector<Criterion> criteria = {
        {1, "worked example: gradient of the eigenvalue product at Diag(1,2)", 1.0,
         [] { return judge(verify_regression(), "regression."); }},
        {2, "system axioms, 10^4 random pairs per system", 60.0,
         [&] { return judge(verify_axioms(10000, seed), "axioms."); }},
        {3, "projection and distance transfer vs brute force, 200 points per pairing", 120.0,
         [&] { return judge(verify_projections(200, seed), "projection."); }},
        {4, "normal cone witnesses pass the limit test, planted non-normals fail", 60.0,
         [&] { return judge(verify_normals(100, seed), "normal."); }},
        {5, "subgradient transfer and planted non-subgradients", 60.0,
         [&] {
             const auto all = verify_subgradients(100, seed);
             return judge(select(all, {"subgradient.", "gradient."}));
         }},
        {6, "Clarke cross-containment for the top eigenvalue at Id(2), Id(3)", 120.0,
         [&] {
             const auto all = verify_clarke(seed, default_clarke_options());
             return judge(select(all, {"clarke.support_gap.", "clarke.trace.", "clarke.min_eigenvalue."}));
         }},
        {7, "generalized Lidskii inclusion, 10^3 pairs per system", 300.0,
         [&] { return judge(verify_lidskii(1000, seed)); }},
        {8, "commutation at the closed-form minimizer", 10.0,
         [&] {
             const auto all = verify_commutation(10, seed);
             return judge(select(all, {"commutation.quadratic_"}));
         }},
        {9, "determinism of verify --suite all --seed 1", 1800.0, [] { return determinism(); }},
    };

    bool all_pass = true;
    for (const Criterion& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string(" [exception: ") + e.what() + "]";
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (secs > c.budget_s) {
            o.pass = false;
            o.detail += " [over time budget]";
        }
        all_pass = all_pass && o.pass;
        std::printf("%s criterion %d: %s (%.2fs, budget %.0fs)%s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                    c.budget_s, o.detail.c_str());
        std::fflush(stdout);
    }
    return all_pass ? 0 : 1;
}
