#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "specvar/io.hpp"
#include "specvar/majorize.hpp"
#include "specvar/oracle.hpp"
#include "specvar/varcalc.hpp"
#include "specvar/verify.hpp"

using namespace specvar;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kCheckFailed = 1, kBadInput = 2, kNumeric = 3, kUnknownOracle = 4, kUnconverged = 5 };

struct Common {
    std::string system = "eigsym";
    std::string in;
    std::optional<double> xi;
    std::uint64_t seed = 0;
};

int exit_code(ErrorCode c) {
    switch (c) {
    case ErrorCode::InvalidShape:
    case ErrorCode::InvalidData:
    case ErrorCode::InvalidParam:
    case ErrorCode::GroupMismatch:
    case ErrorCode::NotInSet: return kBadInput;
    case ErrorCode::UnknownOracle: return kUnknownOracle;
    case ErrorCode::Unconverged: return kUnconverged;
    default: return kNumeric;
    }
}

std::uint64_t env_seed() {
    const char* s = std::getenv("SPECVAR_SEED");
    if (!s || !*s) return 0;
    try {
        std::size_t used = 0;
        const unsigned long long v = std::stoull(s, &used);
        if (used != std::string(s).size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidParam, "SPECVAR_SEED is not an unsigned integer");
    }
}

/// Reads --in and builds the system from its shape; --xi selects the product lift.
std::pair<SystemKind, Ambient> load_point(const Common& c) {
    const Mat m = read_matrix_file(c.in);
    SystemKind kind;
    if (c.system == "trivial-norm") kind = parse_system(c.system, static_cast<int>(m.size()), 1);
    else kind = parse_system(c.system, static_cast<int>(m.rows()), static_cast<int>(m.cols()));
    if (c.xi) kind = product_lift(kind);
    return {kind, ambient_from_matrix(kind, m, c.xi.value_or(0.0))};
}

void emit(const json& j, const std::string& out) {
    const std::string text = j.dump(2);
    if (out.empty()) {
        std::cout << text << '\n';
        return;
    }
    std::ofstream f(out);
    if (!f) throw Error(ErrorCode::InvalidParam, "cannot write " + out);
    f << text << '\n';
}

FunctionOracle load_function(const std::string& spec, const SystemKind& kind) {
    const auto [name, params] = parse_registry_spec(spec);
    return builtin_function(name, params, kind);
}

SetOracle load_set(const std::string& spec, const SystemKind& kind) {
    const auto [name, params] = parse_registry_spec(spec);
    return builtin_set(name, params, kind);
}

json cmd_spectrum(const Common& c) {
    const auto [kind, X] = load_point(c);
    return to_json(spectrum(kind, X));
}

json cmd_grad(const Common& c, const std::string& fspec) {
    const auto [kind, X] = load_point(c);
    const FunctionOracle f = load_function(fspec, kind);
    const Ambient G = spectral_gradient(f, kind, X);
    const Vec g = to_coords(kind, G);
    const Vec num = finite_difference_gradient(ambient_field(f, kind), to_coords(kind, X));
    return {{"anchor", "gradient of a spectral function"},
            {"system", kind.name()},
            {"function", fspec},
            {"spectrum", to_json(spectrum(kind, X))},
            {"gradient", to_json(G)},
            {"fd_agreement", (g - num).norm() / std::max(1.0, g.norm())}};
}

json cmd_subdiff(const Common& c, const std::string& fspec, const std::string& flavor, int samples) {
    const auto [kind, X] = load_point(c);
    const FunctionOracle f = load_function(fspec, kind);
    Rng rng(c.seed);
    std::vector<SubgradientWitness> ws;
    if (flavor == "frechet") ws = frechet_subdifferential(f, kind, X, samples, rng);
    else if (flavor == "limiting") ws = limiting_subdifferential(f, kind, X, samples, rng);
    else throw Error(ErrorCode::InvalidParam, "flavor must be frechet or limiting");

    const ScalarField phi = ambient_field(f, kind);
    const Vec x0 = to_coords(kind, X);
    json items = json::array();
    bool all = true;
    for (const SubgradientWitness& w : ws) {
        json item = to_json(w);
        if (flavor == "frechet") {
            const Verdict v = frechet_subgradient_test(phi, x0, to_coords(kind, w.vector), 32, rng);
            item["check"] = to_json(v);
            all = all && v.pass;
        }
        items.push_back(std::move(item));
    }
    return {{"anchor", flavor + " subdifferential of a spectral function"},
            {"system", kind.name()},
            {"function", fspec},
            {"witnesses", items},
            {"all_checks_pass", all}};
}

json cmd_clarke(const Common& c, const std::string& fspec, int samples) {
    const auto [kind, X] = load_point(c);
    const FunctionOracle f = load_function(fspec, kind);
    Rng rng(c.seed);
    ClarkeOptions opts;
    opts.samples_per_radius = samples;
    opts.decompositions = samples;
    const ClarkeEstimate est = clarke_subdifferential(f, kind, X, opts, rng);
    auto points = [](const HullApprox& h) {
        json a = json::array();
        for (const Ambient& p : h.points) a.push_back(to_json(p));
        return a;
    };
    return {{"anchor", "Clarke subdifferential of a spectral function"},
            {"system", kind.name()},
            {"function", fspec},
            {"formula_points", points(est.formula)},
            {"definition_points", points(est.definition)},
            {"support_gap", support_gap(kind, est.formula, est.definition, 128, rng)},
            {"lipschitz_outer", est.lipschitz_outer},
            {"lipschitz_inner", est.lipschitz_inner}};
}

json cmd_project(const Common& c, const std::string& sspec, int count) {
    const auto [kind, X] = load_point(c);
    const SetOracle D = load_set(sspec, kind);
    Rng rng(c.seed);
    const double dist = spectral_distance(D, kind, X);
    json proj = json::array();
    for (const ProjectionWitness& w : spectral_project(D, kind, X, count, rng))
        proj.push_back({{"point", to_json(w.point)},
                        {"reduced", to_json(w.z)},
                        {"decomposition", to_json(w.decomposition)},
                        {"multivalued", w.multivalued}});
    json j{{"anchor", "projection onto a spectral set"},
           {"system", kind.name()},
           {"set", sspec},
           {"distance", dist},
           {"projections", proj}};
    const Vec x = spectrum(kind, X);
    if (x.size() <= 4) {
        const Vec best = brute_project(D.contains, x, x.norm() + 1.5).front();
        j["brute_distance"] = (best - x).norm();
        j["brute_agreement"] = std::abs((best - x).norm() - dist);
    }
    return j;
}

json cmd_normal(const Common& c, const std::string& sspec, bool limiting, int count) {
    const auto [kind, X] = load_point(c);
    const SetOracle D = load_set(sspec, kind);
    Rng rng(c.seed);
    const auto ws = limiting ? spectral_limiting_normal_elements(D, kind, X, count, rng)
                             : spectral_normal_cone_elements(D, kind, X, count, rng);
    json items = json::array();
    bool all = true;
    for (const SubgradientWitness& w : ws) {
        json item = to_json(w);
        if (!limiting) {
            const Verdict v = frechet_normal_membership(D, kind, X, w.vector);
            item["check"] = to_json(v);
            all = all && v.pass;
        }
        items.push_back(std::move(item));
    }
    return {{"anchor", std::string(limiting ? "limiting" : "Fréchet") + " normal cone of a spectral set"},
            {"system", kind.name()},
            {"set", sspec},
            {"witnesses", items},
            {"all_checks_pass", all}};
}

struct LidskiiResult {
    json report;
    bool pass = true;
    bool converged = true;
};

LidskiiResult cmd_lidskii(const std::string& system, int n, int cols, bool product, long trials,
                          std::uint64_t seed) {
    SystemKind kind = parse_system(system, n, system == "svd" ? (cols > 0 ? cols : n)
                                              : system == "trivial-norm" ? 1 : n);
    if (product) kind = product_lift(kind);
    if (trials < 1) throw Error(ErrorCode::InvalidParam, "trials must be >= 1");
    LidskiiResult r;
    double worst = 0.0;
    long failures = 0, brute_disagree = 0, unconverged = 0;
    for (long i = 0; i < trials; ++i) {
        Rng rng = trial_rng(seed, "cli.lidskii", static_cast<std::uint64_t>(i));
        const Ambient X = i % 3 == 0 ? random_ambient_with_ties(kind, rng) : random_ambient(kind, rng);
        const Ambient Y = random_ambient(kind, rng);
        const LidskiiReport rep = lidskii_check(kind, X, Y);
        worst = std::max(worst, rep.certificate.distance);
        if (!rep.pass || !rep.verdicts_agree) ++failures;
        if (!rep.certificate.converged) ++unconverged;
        if (kind.group_dim() <= 4 && brute_hull_membership(kind, rep.target, rep.increment).pass != rep.pass)
            ++brute_disagree;
    }
    r.pass = failures == 0 && brute_disagree == 0;
    r.converged = unconverged == 0;
    r.report = {{"anchor", "generalized Lidskii inclusion"},
                {"system", kind.name()},
                {"trials", trials},
                {"seed", seed},
                {"max_distance", worst},
                {"failures", failures},
                {"brute_disagreements", brute_disagree},
                {"unconverged", unconverged},
                {"pass", r.pass}};
    return r;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral decomposition systems: transfer formulas and their numerical checks"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    Common c;
    std::string fspec, sspec, flavor = "frechet", suite = "all", out;
    std::optional<std::uint64_t> seed;
    std::optional<long> trials;
    int samples = 4, n = 3, cols = 0;
    bool limiting = false, product = false;

    auto with_point = [&](CLI::App* sub) {
        sub->add_option("--system", c.system, "trivial-norm | eigsym | svd | signed-svd")->capture_default_str();
        sub->add_option("--in", c.in, "matrix file ('rows cols' header, then rows)")->required();
        sub->add_option("--xi", c.xi, "scalar of the product lift (enables the lift)");
        sub->add_option("--seed", seed, "random seed (default: SPECVAR_SEED or 0)");
        sub->add_option("--out", out, "write JSON here instead of stdout");
    };

    auto* spectrum_cmd = app.add_subcommand("spectrum", "ordered spectrum of a matrix");
    with_point(spectrum_cmd);
    auto* grad_cmd = app.add_subcommand("grad", "gradient of a spectral function");
    with_point(grad_cmd);
    grad_cmd->add_option("--f", fspec, "function, e.g. coordprod or abspowsum:p=3")->required();
    auto* subdiff_cmd = app.add_subcommand("subdiff", "Fréchet or limiting subgradients");
    with_point(subdiff_cmd);
    subdiff_cmd->add_option("--f", fspec)->required();
    subdiff_cmd->add_option("--flavor", flavor, "frechet | limiting")->capture_default_str();
    subdiff_cmd->add_option("--samples", samples, "decompositions per vertex")->capture_default_str();
    auto* clarke_cmd = app.add_subcommand("clarke", "gradient-sampled Clarke subdifferential");
    with_point(clarke_cmd);
    clarke_cmd->add_option("--f", fspec)->required();
    int clarke_samples = 256;
    clarke_cmd->add_option("--samples", clarke_samples, "samples per radius")->capture_default_str();
    auto* project_cmd = app.add_subcommand("project", "projection onto a spectral set");
    with_point(project_cmd);
    project_cmd->add_option("--set", sspec, "set, e.g. sparse:k=1 or box:r=2")->required();
    project_cmd->add_option("--samples", samples, "decompositions to report")->capture_default_str();
    auto* normal_cmd = app.add_subcommand("normal", "normal cone elements of a spectral set");
    with_point(normal_cmd);
    normal_cmd->add_option("--set", sspec)->required();
    normal_cmd->add_flag("--limiting", limiting, "limiting instead of Fréchet normals");
    normal_cmd->add_option("--samples", samples)->capture_default_str();

    auto* lidskii_cmd = app.add_subcommand("lidskii", "random checks of the Lidskii inclusion");
    lidskii_cmd->add_option("--system", c.system)->capture_default_str();
    lidskii_cmd->add_option("--n", n, "rows (and size for square systems)")->capture_default_str();
    lidskii_cmd->add_option("--cols", cols, "columns for svd (default: n)");
    lidskii_cmd->add_flag("--product", product, "use the product lift");
    lidskii_cmd->add_option("--trials", trials);
    lidskii_cmd->add_option("--seed", seed);
    lidskii_cmd->add_option("--out", out);

    auto* verify_cmd = app.add_subcommand("verify", "run verification suites");
    verify_cmd->add_option("--suite", suite)
        ->check(CLI::IsMember(suite_names()))
        ->capture_default_str();
    verify_cmd->add_option("--trials", trials);
    verify_cmd->add_option("--seed", seed);
    verify_cmd->add_option("--out", out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kBadInput;
    }

    try {
        c.seed = seed ? *seed : env_seed();
        if (*spectrum_cmd) emit(cmd_spectrum(c), out);
        else if (*grad_cmd) emit(cmd_grad(c, fspec), out);
        else if (*subdiff_cmd) emit(cmd_subdiff(c, fspec, flavor, samples), out);
        else if (*clarke_cmd) emit(cmd_clarke(c, fspec, clarke_samples), out);
        else if (*project_cmd) emit(cmd_project(c, sspec, samples), out);
        else if (*normal_cmd) emit(cmd_normal(c, sspec, limiting, samples), out);
        else if (*lidskii_cmd) {
            const LidskiiResult r = cmd_lidskii(c.system, n, cols, product, trials.value_or(100), c.seed);
            emit(r.report, out);
            if (!r.converged) return kUnconverged;
            return r.pass ? kOk : kCheckFailed;
        } else if (*verify_cmd) {
            RunReport rep = run_suite(suite, c.seed, trials);
            emit(to_json(rep), out);
            std::cerr << (rep.pass ? "PASS" : "FAIL") << " suite=" << suite << " checks=" << rep.records.size()
                      << " wall_time=" << rep.wall_time << "s\n";
            return rep.pass ? kOk : kCheckFailed;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_code(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumeric;
    }
    return kOk;
}
