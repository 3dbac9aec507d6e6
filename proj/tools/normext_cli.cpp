//
// normext — batch front end for the normal-extension toolkit.
//
// Subcommands: validate, check-normality, spectrum, snumbers, transform,
// examples, verify. Configs are JSON (schema "normext/1"); reports are JSON,
// series are CSV. Exit codes: 0 pass, 2 validation failure, 3 assertion
// failure, 4 I/O error.
//

#include <CLI11.hpp>

#include <cstdio>
#include <future>
#include <iostream>
#include <numbers>

#include "normext/normext.hpp"

namespace {

using namespace normext;

constexpr int kOk = 0, kValidation = 2, kAssertion = 3, kIo = 4;
constexpr double kPi = std::numbers::pi;

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open for writing: " + tmp);
        out << content;
        if (!out.good()) throw IoError("write failed: " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) throw IoError("rename failed: " + path);
}

// JSON report to --out (atomic) or stdout
void emit(const json& report, const std::string& out) {
    const std::string text = report.dump(2) + "\n";
    if (out.empty())
        std::cout << text;
    else
        atomic_write(out, text);
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json validation_to_json(const ValidationReport& rep) {
    json checks = json::array();
    for (const auto& c : rep.checks)
        checks.push_back(
            {{"name", c.name}, {"passed", c.passed}, {"defect", c.defect}, {"tolerance", c.tolerance}});
    return {{"schema", "normext-report/1"},
            {"valid", rep.valid},
            {"checks", std::move(checks)},
            {"warnings", rep.warnings}};
}

// ---------------------------------------------------------------- validate

int run_validate(const std::string& config_path, double evolution_step, const std::string& out) {
    auto cfg = load_problem_config(config_path);
    if (evolution_step > 0.0) cfg.numerics.evolution_step = evolution_step;
    const auto ext = make_extension(cfg);
    const auto rep = validate(ext);
    emit(validation_to_json(rep), out);
    return rep.valid ? kOk : kValidation;
}

// --------------------------------------------------------- check-normality

int run_check_normality(const std::string& config_path, double evolution_step,
                        const std::string& out) {
    auto cfg = load_problem_config(config_path);
    if (evolution_step > 0.0) cfg.numerics.evolution_step = evolution_step;
    const auto ext = make_extension(cfg);
    require_valid(ext);

    const auto path = make_coefficient_path(cfg);
    const auto grid = residual_grid(cfg.weight, cfg.numerics.residual_grid_n);
    const double residual = normality_residual(path, cfg.weight, grid);
    const double margin = accretivity_margin(path, cfg.weight, grid);

    json report{{"schema", "normext-report/1"},
                {"residual", residual},
                {"tolerance", cfg.numerics.normality_tolerance},
                {"accretivity_margin", margin},
                {"perturb_eps", cfg.perturb_eps}};
    bool normal = residual <= cfg.numerics.normality_tolerance;
    try {
        const auto ex = extract_constant_C(path, cfg.weight, grid);
        report["constant"] = {{"matrix", matrix_to_json(ex.c.matrix())},
                              {"max_deviation", ex.max_deviation},
                              {"min_eigenvalue", ex.c.min_eigenvalue()},
                              {"positivity_boundary_warning", ex.psd_boundary_warning}};
    } catch (const NotConstantFormError& e) {
        report["constant"] = nullptr;
        report["constant_error"] = e.what();
        normal = false;
    } catch (const PositivityError& e) {
        report["constant"] = nullptr;
        report["constant_error"] = e.what();
        normal = false;
    }
    report["formally_normal"] = normal;
    emit(report, out);
    if (!normal) {
        std::cerr << "not formally normal (residual " << fmt(residual) << ")\n";
        return kAssertion;
    }
    return kOk;
}

// ----------------------------------------------------------------- spectrum

int run_spectrum(const std::string& config_path, int kmin_flag, int kmax_flag, int oracle_n,
                 bool no_oracle, double evolution_step, const std::string& out,
                 const std::string& csv) {
    auto cfg = load_problem_config(config_path);
    if (evolution_step > 0.0) cfg.numerics.evolution_step = evolution_step;
    if (kmin_flag != INT_MIN) cfg.numerics.k_min = kmin_flag;
    if (kmax_flag != INT_MIN) cfg.numerics.k_max = kmax_flag;
    if (oracle_n > 0) cfg.numerics.grid_n = oracle_n;

    const auto ext = make_extension(cfg);
    require_valid(ext);

    const auto closed = closed_form_spectrum(ext, {cfg.numerics.k_min, cfg.numerics.k_max});
    const auto points = closed.lattice.enumerate();

    json jbranches = json::array();
    for (const auto& b : closed.lattice.branches())
        jbranches.push_back({{"rho", b.rho}, {"theta", b.theta}});
    json jpoints = json::array();
    for (const auto& p : points)
        jpoints.push_back(
            {{"re", p.lambda.real()}, {"im", p.lambda.imag()}, {"branch", p.branch}, {"k", p.k}});

    json report{{"schema", "normext-report/1"},
                {"branches", std::move(jbranches)},
                {"points", std::move(jpoints)},
                {"cross_check_defect", closed.cross_check_defect},
                {"determinant_defect", lattice_determinant_defect(ext, closed.lattice)}};

    bool pass = true;
    if (!no_oracle) {
        const auto discrete = discretized_spectrum(ext, cfg.numerics.grid_n);
        const auto match = match_spectra(points, discrete,
                                         cfg.numerics.im_trust_factor * cfg.numerics.grid_n);
        pass = match.unmatched_count == 0 &&
               match.max_pairing_distance <= cfg.numerics.match_tolerance;
        report["oracle"] = {{"n", cfg.numerics.grid_n},
                            {"matched", match.matched_count},
                            {"unmatched", match.unmatched_count},
                            {"max_pairing_distance", match.max_pairing_distance},
                            {"bound", cfg.numerics.match_tolerance}};
    }
    report["pass"] = pass;

    if (!csv.empty()) {
        std::string text = "re,im,branch,k\n";
        for (const auto& p : points)
            text += fmt(p.lambda.real()) + "," + fmt(p.lambda.imag()) + "," +
                    std::to_string(p.branch) + "," + std::to_string(p.k) + "\n";
        atomic_write(csv, text);
    }
    emit(report, out);
    return pass ? kOk : kAssertion;
}

// ----------------------------------------------------------------- snumbers

int run_snumbers(const std::string& config_path, int count, double beta, int growth_dim,
                 long fit_from, long fit_to, const std::string& out, const std::string& csv) {
    auto cfg = load_problem_config(config_path);
    if (count > 0) cfg.numerics.snumber_count = count;
    if (fit_from > 0) cfg.numerics.fit_from = static_cast<std::size_t>(fit_from);
    if (fit_to > 0) cfg.numerics.fit_to = static_cast<std::size_t>(fit_to);

    json report{{"schema", "normext-report/1"}};
    std::vector<LatticeBranch> branches;
    if (beta > 0.0) {
        const int d = growth_dim > 0 ? growth_dim : cfg.dim;
        const auto ext = power_growth_extension(d, beta);
        branches = detail::branches_from_joint_diagonalization(ext);
        report["growth_model"] = {{"beta", beta}, {"dim", d}};
    } else {
        const auto ext = make_extension(cfg);
        require_valid(ext);
        branches = detail::branches_from_joint_diagonalization(ext);
    }

    const auto seq = lattice_singular_values(branches, cfg.numerics.snumber_count);
    IndexRange range =
        (cfg.numerics.fit_from > 0 && cfg.numerics.fit_to > cfg.numerics.fit_from)
            ? IndexRange{cfg.numerics.fit_from, cfg.numerics.fit_to}
            : default_fit_range(seq, saturation_count(branches));
    const auto fit = fit_decay_exponent(seq, range);
    report["count"] = seq.size();
    report["fit"] = {{"from", range.from},
                     {"to", range.to},
                     {"exponent", fit.exponent},
                     {"prefactor", fit.prefactor},
                     {"r_squared", fit.r_squared}};

    json jschatten = json::array();
    for (double p : cfg.numerics.schatten_p) {
        const auto rep = schatten_p_report(seq, p, fit);
        const char* verdict = rep.verdict == SchattenReport::Verdict::Convergent   ? "convergent"
                              : rep.verdict == SchattenReport::Verdict::Divergent ? "divergent"
                                                                                  : "inconclusive";
        jschatten.push_back({{"p", p},
                             {"p_theta", rep.p_theta},
                             {"partial_sum", rep.partial_sum},
                             {"verdict", verdict}});
    }
    report["schatten"] = std::move(jschatten);

    // audit of the n s_n limit: measured against the lattice-counting density
    // d/pi, with the single-branch one-sided constant 1/(2 pi) listed for
    // comparison
    const std::size_t tail_lo = std::max<std::size_t>(1, seq.size() - seq.size() / 10);
    std::vector<double> tail;
    for (std::size_t n = tail_lo; n <= seq.size(); ++n)
        tail.push_back(static_cast<double>(n) * seq.values[n - 1]);
    std::nth_element(tail.begin(), tail.begin() + static_cast<long>(tail.size() / 2), tail.end());
    const double measured = tail[tail.size() / 2];
    const int d_branches = static_cast<int>(branches.size());
    report["constant_audit"] = {{"n_s_n_measured", measured},
                                {"lattice_counting_prediction", d_branches / kPi},
                                {"single_branch_one_sided", 1.0 / (2.0 * kPi)}};

    if (!csv.empty()) {
        std::string text = "n,s_n\n";
        for (std::size_t n = 1; n <= seq.size(); ++n)
            text += std::to_string(n) + "," + fmt(seq.values[n - 1]) + "\n";
        atomic_write(csv, text);
    }
    emit(report, out);
    return kOk;
}

// ---------------------------------------------------------------- transform

int run_transform(const std::string& config_path, const std::string& from_weight,
                  const std::string& to_weight, const std::string& out) {
    const auto cfg = load_problem_config(config_path);
    WeightFunction wfrom = cfg.weight;
    if (!from_weight.empty())
        wfrom = cfg_detail::parse_weight(json::parse(from_weight), "--from-weight");
    if (to_weight.empty()) throw ConfigError("--to-weight is required");
    const WeightFunction wto = cfg_detail::parse_weight(json::parse(to_weight), "--to-weight");

    const ConstantOperator c(cfg.c_matrix);
    auto conj = conjugated_expression(c, cfg.a_i, wto);

    json samples = json::array();
    for (double t : {0.2, 0.4, 0.6, 0.8})
        samples.push_back({{"t", t}, {"a_r", matrix_to_json(conj.a_r(t))}});

    WeightTransform tr(wfrom, wto);
    const auto iso =
        isometry_check(tr, [d = cfg.dim](double t) {
            return (VectorXcd::Constant(d, complexd(1.0, 0.0)) * std::exp(complexd(0.0, t))).eval();
        });
    const auto transfer = formal_normality_transfer_check(c, cfg.a_i, wfrom, wto,
                                                          cfg.numerics.residual_grid_n);

    json report{{"schema", "normext-report/1"},
                {"from_weight", weight_to_json(wfrom)},
                {"to_weight", weight_to_json(wto)},
                {"multiplier", "sqrt(from/to)"},
                {"conjugated",
                 {{"real_part", "0.5*log_derivative(to_weight)*I + C"},
                  {"constant", matrix_to_json(c.matrix())},
                  {"imaginary_kind", cfg.a_i_kind},
                  {"samples", std::move(samples)}}},
                {"isometry", {{"relative_error", iso.relative_error},
                              {"excluded_mass", iso.excluded_mass},
                              {"excluded_nodes", iso.excluded_nodes}}},
                {"normality_residuals",
                 {{"from_space", transfer.residual_alpha}, {"to_space", transfer.residual_beta}}}};
    emit(report, out);
    return kOk;
}

// ----------------------------------------------------------------- examples

struct Claim {
    std::string name;
    bool passed;
    std::string detail;
};

json claims_to_json(const std::vector<Claim>& claims) {
    json arr = json::array();
    for (const auto& c : claims)
        arr.push_back({{"claim", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return arr;
}

int report_claims(const std::vector<Claim>& claims, const std::string& out, const char* label) {
    bool all = true;
    for (const auto& c : claims) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
        if (!c.detail.empty()) std::cout << " (" << c.detail << ")";
        std::cout << "\n";
        all = all && c.passed;
    }
    std::cout << label << ": " << (all ? "all claims hold" : "FAILURES present") << "\n";
    if (!out.empty()) emit({{"schema", "normext-report/1"}, {"claims", claims_to_json(claims)}}, out);
    if (!all) {
        for (const auto& c : claims)
            if (!c.passed) std::cerr << "failed claim: " << c.name << "\n";
        return kAssertion;
    }
    return kOk;
}

// worked example 1: sine weight, scalar, c = 1, phase pi/2
std::vector<Claim> sine_family_claims() {
    std::vector<Claim> claims;
    const json cfgj = json::parse(R"({
        "schema": "normext/1", "dim": 1,
        "weight": {"kind": "sine", "gamma": 2.0},
        "C": {"diag": [1.0]},
        "a_i": {"kind": "zero"},
        "W": {"diag_phases": [1.5707963267948966]},
        "numerics": {"grid_n": 2048, "k_min": -7, "k_max": 7}
    })");
    const auto cfg = parse_problem_config(cfgj);
    const auto ext = make_extension(cfg);
    const double c = 1.0, phi = kPi / 2;

    const auto closed = closed_form_spectrum(ext, {cfg.numerics.k_min, cfg.numerics.k_max});
    double lattice_err = 0.0;
    for (const auto& p : closed.lattice.enumerate())
        lattice_err = std::max(lattice_err,
                               std::abs(p.lambda - complexd(c, phi + 2.0 * kPi * p.k)));
    claims.push_back({"sine-family/lattice-closed-form", lattice_err <= 1e-12,
                      "max deviation " + fmt(lattice_err)});

    const auto path = make_coefficient_path(cfg);
    const auto grid = residual_grid(cfg.weight);
    const double residual = normality_residual(path, cfg.weight, grid);
    claims.push_back({"sine-family/normality-residual", residual <= 1e-6, fmt(residual)});

    const auto match = match_spectra(closed.lattice.enumerate(),
                                     discretized_spectrum(ext, cfg.numerics.grid_n),
                                     cfg.numerics.im_trust_factor * cfg.numerics.grid_n);
    claims.push_back({"sine-family/oracle-match",
                      match.unmatched_count == 0 && match.max_pairing_distance <= 0.05,
                      "distance " + fmt(match.max_pairing_distance) + ", unmatched " +
                          std::to_string(match.unmatched_count)});
    return claims;
}

// worked example 2: two-weight pair t^2 and (1-t)^2 sharing (C, W)
std::vector<Claim> two_weight_claims(double phase_mismatch) {
    std::vector<Claim> claims;
    const double c = 0.7, phi = 0.0;
    NormalExtension lext(WeightFunction::power(2.0), ConstantOperator::diagonal({c}), nullptr,
                         MatrixXcd::Constant(1, 1, std::polar(1.0, phi)));
    NormalExtension jext(WeightFunction::reflected_power(2.0), ConstantOperator::diagonal({c}),
                         nullptr, MatrixXcd::Constant(1, 1, std::polar(1.0, phi + phase_mismatch)));

    const auto llat = closed_form_spectrum(lext, {-6, 6}).lattice;
    const auto jlat = closed_form_spectrum(jext, {-6, 6}).lattice;
    claims.push_back({"two-weight/identical-lattices", llat.branches() == jlat.branches(),
                      "branch tuples compared exactly"});

    double formula_err = 0.0;
    for (const auto& p : llat.enumerate())
        formula_err = std::max(formula_err,
                               std::abs(p.lambda - complexd(c, phi + 2.0 * kPi * p.k)));
    claims.push_back({"two-weight/published-spectrum", formula_err <= 1e-12,
                      "max deviation " + fmt(formula_err)});

    WeightTransform tr(WeightFunction::reflected_power(2.0), WeightFunction::power(2.0));
    const std::vector<std::function<complexd(double)>> tests{
        [](double) { return complexd(1.0, 0.0); },
        [](double t) { return complexd(t, 0.0); },
        [](double t) { return complexd(std::exp(t), 0.0); },
        [](double t) { return complexd(std::sin(3 * t), std::cos(t)); },
        [](double t) { return complexd(1.0 / (1.0 + t * t), t * t); }};
    double iso_err = 0.0;
    for (const auto& f : tests)
        iso_err = std::max(
            iso_err,
            isometry_check(tr, [&](double t) { return VectorXcd::Constant(1, f(t)); }).relative_error);
    claims.push_back({"two-weight/transform-isometry", iso_err <= 1e-8, fmt(iso_err)});

    // boundary transfer: g = e^{i phi t} gives a beta-condition function
    std::vector<double> nodes{1e-4, 2e-4, 3e-4};
    for (int i = 1; i <= 19; ++i) nodes.push_back(i / 20.0);
    nodes.insert(nodes.end(), {1.0 - 3e-4, 1.0 - 2e-4, 1.0 - 1e-4});
    const double phib = 0.9;
    auto beta = WeightFunction::reflected_power(2.0);
    auto ub = sample_scalar([&](double t) { return std::polar(1.0, phib * t) / std::sqrt(beta(t)); },
                            nodes);
    NormalExtension in_beta(beta, ConstantOperator::diagonal({c}), nullptr,
                            MatrixXcd::Constant(1, 1, std::polar(1.0, phib)));
    NormalExtension in_alpha(WeightFunction::power(2.0), ConstantOperator::diagonal({c}), nullptr,
                             MatrixXcd::Constant(1, 1, std::polar(1.0, phib)));
    const double rbeta = boundary_residual(in_beta, ub);
    const double ralpha = boundary_residual(in_alpha, tr.apply(ub));
    claims.push_back({"two-weight/boundary-transfer", rbeta <= 1e-6 && ralpha <= 1e-6,
                      fmt(rbeta) + " / " + fmt(ralpha)});
    return claims;
}

int run_examples(bool broken, const std::string& out) {
    std::vector<Claim> claims = sine_family_claims();
    auto more = two_weight_claims(broken ? 0.3 : 0.0);
    claims.insert(claims.end(), more.begin(), more.end());
    return report_claims(claims, out, "examples");
}

// ------------------------------------------------------------------- verify

int run_verify(int jobs, const std::string& out) {
    using Suite = std::function<std::vector<Claim>()>;
    std::vector<std::pair<std::string, Suite>> suites;

    suites.emplace_back("weights", [] {
        auto w = WeightFunction::power(2.0);
        auto g = QuadratureGrid::for_weight(w);
        auto one = sample_scalar([](double) { return complexd(1.0, 0.0); }, g.nodes);
        const double val = weighted_norm_sq(one, w, g);
        return std::vector<Claim>{{"weights/quadrature-t2", std::abs(val - 1.0 / 3.0) <= 1e-12,
                                   fmt(val)}};
    });
    suites.emplace_back("evolution", [] {
        Propagator p(1, [](double t) { return MatrixXcd::Constant(1, 1, 2.0 * kPi * t); });
        const auto rep = p.unitarity_report();
        const double phase_err = std::abs(p(0.0, 1.0)(0, 0) + 1.0);
        return std::vector<Claim>{
            {"evolution/unitarity", rep.max_unitarity_defect <= 1e-8, fmt(rep.max_unitarity_defect)},
            {"evolution/cocycle", rep.max_cocycle_defect <= 1e-8, fmt(rep.max_cocycle_defect)},
            {"evolution/endpoint-phase", phase_err <= 1e-8, fmt(phase_err)}};
    });
    suites.emplace_back("spectral", [] {
        NormalExtension ext(WeightFunction::sine(2.0), ConstantOperator::diagonal({1.0}), nullptr,
                            MatrixXcd::Constant(1, 1, std::polar(1.0, kPi / 2)));
        const auto closed = closed_form_spectrum(ext, {-5, 5});
        const auto match =
            match_spectra(closed.lattice.enumerate(), discretized_spectrum(ext, 512), 0.2 * 512);
        return std::vector<Claim>{
            {"spectral/cross-check", closed.cross_check_defect <= 1e-10, fmt(closed.cross_check_defect)},
            {"spectral/oracle-match", match.unmatched_count == 0 && match.max_pairing_distance <= 0.1,
             fmt(match.max_pairing_distance)}};
    });
    suites.emplace_back("snumbers", [] {
        std::vector<LatticeBranch> branches{{0.9, 0.4}, {2.1, -1.3}};
        auto s = lattice_singular_values(branches, 2000);
        auto fit = fit_decay_exponent(s, {200, 1900});
        return std::vector<Claim>{
            {"snumbers/first-order-decay", std::abs(fit.exponent + 1.0) <= 0.02, fmt(fit.exponent)}};
    });
    suites.emplace_back("transforms", [] {
        WeightTransform tr(WeightFunction::reflected_power(2.0), WeightFunction::power(2.0));
        auto chk = isometry_check(tr, [](double t) {
            return VectorXcd::Constant(1, complexd(std::exp(t), std::sin(t)));
        });
        return std::vector<Claim>{{"transforms/isometry", chk.relative_error <= 1e-8,
                                   fmt(chk.relative_error)}};
    });
    suites.emplace_back("coefficients", [] {
        auto w = WeightFunction::sine(2.0);
        auto a = CoefficientPath::normal_form(w, ConstantOperator::diagonal({1.0}), nullptr);
        const auto grid = residual_grid(w);
        const double r = normality_residual(a, w, grid);
        return std::vector<Claim>{{"coefficients/normal-form-residual", r <= 1e-8, fmt(r)}};
    });

    std::vector<Claim> claims;
    if (jobs > 1) {
        std::vector<std::future<std::vector<Claim>>> futures;
        futures.reserve(suites.size());
        for (auto& [name, suite] : suites)
            futures.push_back(std::async(std::launch::async, suite));
        for (auto& f : futures) {
            auto part = f.get();
            claims.insert(claims.end(), part.begin(), part.end());
        }
    } else {
        for (auto& [name, suite] : suites) {
            auto part = suite();
            claims.insert(claims.end(), part.begin(), part.end());
        }
    }
    return report_claims(claims, out, "verify");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"constructs, validates and spectrally analyzes normal extensions of u' + A(t)u "
                 "in weighted spaces on (0,1)"};
    app.require_subcommand(1);

    std::string config_path, out, csv, from_weight, to_weight;
    int kmin = INT_MIN, kmax = INT_MIN, oracle_n = 0, count = 0, jobs = 2, growth_dim = 0;
    long fit_from = 0, fit_to = 0;
    double beta = 0.0, evolution_step = 0.0;
    bool no_oracle = false, broken = false;

    auto* validate_cmd = app.add_subcommand("validate", "check extension data against its hypotheses");
    validate_cmd->add_option("config", config_path)->required();
    validate_cmd->add_option("--evolution-step", evolution_step);
    validate_cmd->add_option("--out", out);

    auto* normality_cmd =
        app.add_subcommand("check-normality", "formal-normality residual, constant recovery, margin");
    normality_cmd->add_option("config", config_path)->required();
    normality_cmd->add_option("--evolution-step", evolution_step);
    normality_cmd->add_option("--out", out);

    auto* spectrum_cmd = app.add_subcommand("spectrum", "closed-form lattice plus discretized oracle");
    spectrum_cmd->add_option("config", config_path)->required();
    spectrum_cmd->add_option("--k-min", kmin);
    spectrum_cmd->add_option("--k-max", kmax);
    spectrum_cmd->add_option("--oracle-n", oracle_n);
    spectrum_cmd->add_flag("--no-oracle", no_oracle);
    spectrum_cmd->add_option("--evolution-step", evolution_step);
    spectrum_cmd->add_option("--out", out);
    spectrum_cmd->add_option("--csv", csv);

    auto* snumbers_cmd = app.add_subcommand("snumbers", "singular values, decay fit, Schatten verdicts");
    snumbers_cmd->add_option("config", config_path)->required();
    snumbers_cmd->add_option("--count", count);
    snumbers_cmd->add_option("--beta", beta);
    snumbers_cmd->add_option("--dim", growth_dim, "truncation dimension for --beta growth models");
    snumbers_cmd->add_option("--fit-from", fit_from);
    snumbers_cmd->add_option("--fit-to", fit_to);
    snumbers_cmd->add_option("--out", out);
    snumbers_cmd->add_option("--csv", csv);

    auto* transform_cmd = app.add_subcommand("transform", "conjugated expression between weights");
    transform_cmd->add_option("config", config_path)->required();
    transform_cmd->add_option("--from-weight", from_weight);
    transform_cmd->add_option("--to-weight", to_weight);
    transform_cmd->add_option("--out", out);

    auto* examples_cmd = app.add_subcommand("examples", "run the bundled worked examples end to end");
    examples_cmd->add_flag("--broken", broken, "negative control: mismatch the phases on purpose");
    examples_cmd->add_option("--out", out);

    auto* verify_cmd = app.add_subcommand("verify", "run the module check battery");
    verify_cmd->add_option("--jobs", jobs);
    verify_cmd->add_option("--out", out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(validate_cmd)) return run_validate(config_path, evolution_step, out);
        if (app.got_subcommand(normality_cmd))
            return run_check_normality(config_path, evolution_step, out);
        if (app.got_subcommand(spectrum_cmd))
            return run_spectrum(config_path, kmin, kmax, oracle_n, no_oracle, evolution_step, out, csv);
        if (app.got_subcommand(snumbers_cmd))
            return run_snumbers(config_path, count, beta, growth_dim, fit_from, fit_to, out, csv);
        if (app.got_subcommand(transform_cmd))
            return run_transform(config_path, from_weight, to_weight, out);
        if (app.got_subcommand(examples_cmd)) return run_examples(broken, out);
        if (app.got_subcommand(verify_cmd)) return run_verify(jobs, out);
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kIo;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kValidation;
    } catch (const InvalidExtensionError& e) {
        std::cerr << "validation failure: " << e.what() << "\n";
        return kValidation;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kValidation;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kValidation;
    }
    return kOk;
}
