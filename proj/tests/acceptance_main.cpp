//
// Acceptance suite: end-to-end checks of the toolkit against its contract,
// one line per criterion. Exit code 0 only if every criterion passes.
//

#include <chrono>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

#include "normext/normext.hpp"

using namespace normext;

namespace {

constexpr double kPi = std::numbers::pi;

struct Criterion {
    int id;
    std::string title;
    bool passed;
    std::string detail;
};

std::vector<Criterion> results;

void record(int id, const std::string& title, bool passed, const std::string& detail) {
    results.push_back({id, title, passed, detail});
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

NormalExtension sine_family(double c, double phi) {
    return NormalExtension(WeightFunction::sine(2.0), ConstantOperator::diagonal({c}), nullptr,
                           MatrixXcd::Constant(1, 1, std::polar(1.0, phi)));
}

MatrixXcd random_unitary(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    MatrixXcd m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = complexd(g(rng), g(rng));
    return Eigen::HouseholderQR<MatrixXcd>(m).householderQ();
}

// ---------------------------------------------------------------------------
// 1. spectrum of the sine-weight scalar family: closed form exact, oracle at
//    N = 2048 within 0.05 over |k| <= 7, first-order convergence, < 10 s
void criterion1() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    const double c = 1.0;
    for (double phi : {0.0, kPi / 2, 3.0}) {
        const auto ext = sine_family(c, phi);
        const auto closed = closed_form_spectrum(ext, {-7, 7});
        double lattice_err = 0.0;
        for (const auto& p : closed.lattice.enumerate())
            lattice_err =
                std::max(lattice_err, std::abs(p.lambda - complexd(c, phi + 2.0 * kPi * p.k)));
        ok = ok && lattice_err <= 1e-12;

        const auto pts = closed.lattice.enumerate();
        const auto fine = match_spectra(pts, discretized_spectrum(ext, 2048), 0.2 * 2048);
        const auto coarse = match_spectra(pts, discretized_spectrum(ext, 1024), 0.2 * 1024);
        const double ratio = coarse.max_pairing_distance / fine.max_pairing_distance;
        const bool here = fine.unmatched_count == 0 && fine.max_pairing_distance <= 0.05 &&
                          coarse.unmatched_count == 0 && ratio > 1.6 && ratio < 2.4;
        ok = ok && here;
        if (phi == 0.0)
            detail = "lattice err " + fmt(lattice_err) + ", dist " + fmt(fine.max_pairing_distance) +
                     ", h-ratio " + fmt(ratio);
    }
    const double dt = seconds_since(t0);
    ok = ok && dt < 10.0;
    record(1, "sine-family spectrum vs oracle (N=2048, |k|<=7, first order)", ok,
           detail + ", runtime " + fmt(dt) + "s < 10s");
}

// ---------------------------------------------------------------------------
// 2. normality detection across the built-in weights; drift detection;
//    constant recovery within 1e-8 at d = 4
void criterion2() {
    bool ok = true;
    std::string detail;
    const std::vector<double> diag{0.3, 0.7, 1.1, 1.9};
    const auto c = ConstantOperator::diagonal(diag);
    double worst_residual = 0.0, worst_recovery = 0.0;
    for (const auto& w : {WeightFunction::power(2.0), WeightFunction::reflected_power(2.0),
                          WeightFunction::sine(2.0)}) {
        const auto a = CoefficientPath::normal_form(w, c, nullptr);
        const auto grid = residual_grid(w);
        worst_residual = std::max(worst_residual, normality_residual(a, w, grid));
        const auto ex = extract_constant_C(a, w, grid);
        worst_recovery = std::max(worst_recovery, (ex.c.matrix() - c.matrix()).norm());
    }
    ok = ok && worst_residual <= 1e-6 && worst_recovery <= 1e-8;

    const auto wp = WeightFunction::power(2.0);
    const double eps = 0.1;
    const auto perturbed = CoefficientPath::scalar(
        [&wp, eps](double t) { return 1.0 + 0.5 * wp.log_derivative(t) + eps * t; },
        [](double) { return 0.0; });
    const double drift = normality_residual(perturbed, wp, residual_grid(wp));
    ok = ok && std::abs(drift - 0.2) <= 1e-3;

    detail = "residual " + fmt(worst_residual) + ", recovery " + fmt(worst_recovery) +
             ", drift residual " + fmt(drift);
    record(2, "formal-normality detection and constant recovery", ok, detail);
}

// ---------------------------------------------------------------------------
// 3. evolution unitarity at h = 1e-3 and closed-form endpoint phases
void criterion3() {
    bool ok = true;
    Propagator scalar(1, [](double t) { return MatrixXcd::Constant(1, 1, 2.0 * kPi * t); }, 1e-3);
    const auto rep1 = scalar.unitarity_report();
    const double phase1 = std::abs(scalar(0.0, 1.0)(0, 0) - std::polar(1.0, -kPi));
    ok = ok && rep1.max_unitarity_defect <= 1e-8 && rep1.max_cocycle_defect <= 1e-8 && phase1 <= 1e-8;

    MatrixXcd d0 = MatrixXcd::Zero(2, 2);
    d0(0, 0) = 1.0;
    d0(1, 1) = 2.0;
    Propagator pair(2, [d0](double t) { return ((1.0 + t) * d0).eval(); }, 1e-3);
    const auto rep2 = pair.unitarity_report();
    MatrixXcd expected = MatrixXcd::Zero(2, 2);
    expected(0, 0) = std::polar(1.0, -1.5);
    expected(1, 1) = std::polar(1.0, -3.0);
    const double phase2 = (pair(0.0, 1.0) - expected).norm();
    ok = ok && rep2.max_unitarity_defect <= 1e-8 && rep2.max_cocycle_defect <= 1e-8 && phase2 <= 1e-8;

    record(3, "evolution unitarity, cocycle and endpoint phase at h=1e-3", ok,
           "defects " + fmt(std::max(rep1.max_unitarity_defect, rep2.max_unitarity_defect)) + "/" +
               fmt(std::max(rep1.max_cocycle_defect, rep2.max_cocycle_defect)) + ", phases " +
               fmt(std::max(phase1, phase2)));
}

// ---------------------------------------------------------------------------
// 4. growth-law exponent theta = beta/(1+beta) at d=64, m=1e4, +-0.03, < 30 s
void criterion4() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;
    for (double beta : {1.0, 2.0}) {
        const auto ext = power_growth_extension(64, beta);
        const auto branches = detail::branches_from_joint_diagonalization(ext);
        const auto seq = lattice_singular_values(branches, 10000);
        const auto fit = fit_decay_exponent(seq, default_fit_range(seq, saturation_count(branches)));
        const double target = -beta / (1.0 + beta);
        ok = ok && std::abs(fit.exponent - target) <= 0.03;
        detail += (beta == 1.0 ? "beta=1: " : "; beta=2: ") + fmt(fit.exponent) + " vs " + fmt(target);
    }
    const double dt = seconds_since(t0);
    ok = ok && dt < 30.0;
    record(4, "growth-law singular value exponents (d=64, m=1e4)", ok,
           detail + ", runtime " + fmt(dt) + "s < 30s");
}

// ---------------------------------------------------------------------------
// 5. fixed-dimension order and constant audit: exponent -1 +- 0.02 over
//    [1e3, 1e4]; n s_n matches the counting density d/pi within 2%
void criterion5() {
    bool ok = true;
    std::string detail;
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> cdist(0.5, 3.0), pdist(-kPi, kPi);
    for (int d = 1; d <= 3; ++d) {
        std::vector<LatticeBranch> branches;
        for (int j = 0; j < d; ++j) branches.push_back({cdist(rng), pdist(rng)});
        const auto seq = lattice_singular_values(branches, 10000);
        const auto fit = fit_decay_exponent(seq, {1000, 10000});
        std::vector<double> tail;
        for (std::size_t n = 9001; n <= 10000; ++n)
            tail.push_back(static_cast<double>(n) * seq.values[n - 1]);
        std::nth_element(tail.begin(), tail.begin() + static_cast<long>(tail.size() / 2), tail.end());
        const double measured = tail[tail.size() / 2];
        const double predicted = d / kPi;
        ok = ok && std::abs(fit.exponent + 1.0) <= 0.02 &&
             std::abs(measured - predicted) <= 0.02 * predicted;
        if (d == 3)
            detail = "exp " + fmt(fit.exponent) + ", n*s_n " + fmt(measured) + " vs d/pi " +
                     fmt(predicted) + " (single-branch one-sided value 1/(2pi) = " +
                     fmt(1.0 / (2.0 * kPi)) + " reported for comparison)";
    }
    record(5, "fixed-dimension decay order and counting constant", ok, detail);
}

// ---------------------------------------------------------------------------
// 6. two-weight equivalence for (t^2, (1-t)^2): isometry on 5 smooth
//    functions, exact lattice equality, boundary transfer
void criterion6() {
    bool ok = true;
    WeightTransform tr(WeightFunction::reflected_power(2.0), WeightFunction::power(2.0));
    const std::vector<std::function<complexd(double)>> tests{
        [](double) { return complexd(1.0, 0.0); },
        [](double t) { return complexd(t, 0.0); },
        [](double t) { return complexd(std::exp(t), 0.0); },
        [](double t) { return complexd(std::sin(3 * t), std::cos(t)); },
        [](double t) { return complexd(1.0 / (1.0 + t * t), t * t); }};
    double iso = 0.0;
    for (const auto& f : tests)
        iso = std::max(iso, isometry_check(tr, [&](double t) {
                                return VectorXcd::Constant(1, f(t));
                            }).relative_error);
    ok = ok && iso <= 1e-8;

    const double c = 0.7, phi = 0.0;
    NormalExtension lext(WeightFunction::power(2.0), ConstantOperator::diagonal({c}), nullptr,
                         MatrixXcd::Constant(1, 1, std::polar(1.0, phi)));
    NormalExtension jext(WeightFunction::reflected_power(2.0), ConstantOperator::diagonal({c}),
                         nullptr, MatrixXcd::Constant(1, 1, std::polar(1.0, phi)));
    const bool lattices_equal = closed_form_spectrum(lext, {-6, 6}).lattice.branches() ==
                                closed_form_spectrum(jext, {-6, 6}).lattice.branches();
    ok = ok && lattices_equal;

    std::vector<double> nodes{1e-4, 2e-4, 3e-4};
    for (int i = 1; i <= 19; ++i) nodes.push_back(i / 20.0);
    nodes.insert(nodes.end(), {1.0 - 3e-4, 1.0 - 2e-4, 1.0 - 1e-4});
    const double phib = 0.9;
    auto beta = WeightFunction::reflected_power(2.0);
    auto ub = sample_scalar(
        [&](double t) { return std::polar(1.0, phib * t) / std::sqrt(beta(t)); }, nodes);
    NormalExtension in_beta(beta, ConstantOperator::diagonal({c}), nullptr,
                            MatrixXcd::Constant(1, 1, std::polar(1.0, phib)));
    NormalExtension in_alpha(WeightFunction::power(2.0), ConstantOperator::diagonal({c}), nullptr,
                             MatrixXcd::Constant(1, 1, std::polar(1.0, phib)));
    const double transfer =
        std::max(boundary_residual(in_beta, ub), boundary_residual(in_alpha, tr.apply(ub)));
    ok = ok && transfer <= 1e-6;

    record(6, "two-weight equivalence (isometry, lattice equality, boundary transfer)", ok,
           "isometry " + fmt(iso) + ", lattices " + (lattices_equal ? "equal" : "DIFFER") +
               ", transfer " + fmt(transfer));
}

// ---------------------------------------------------------------------------
// 7. eigenfunction certificate: mapped analytic eigenfunctions satisfy the
//    discrete eigen-equation and the boundary condition to 1e-6
void criterion7() {
    bool ok = true;
    double worst_eig = 0.0, worst_boundary = 0.0;
    std::mt19937_64 rng(707);
    std::uniform_real_distribution<double> cdist(0.3, 2.0), pdist(-kPi, kPi), adist(-0.5, 0.5);
    std::uniform_int_distribution<int> ddist(1, 3), kdist(-2, 2);

    // fine uniform grid for the finite-difference residual, clusters at the
    // endpoints for the traces
    std::vector<double> fd_nodes;
    const int m = 1201;
    for (int i = 0; i < m; ++i) fd_nodes.push_back(0.2 + 0.6 * i / (m - 1));
    std::vector<double> trace_nodes{1e-4, 2e-4, 3e-4};
    for (int i = 1; i <= 9; ++i) trace_nodes.push_back(i / 10.0);
    trace_nodes.insert(trace_nodes.end(), {1.0 - 3e-4, 1.0 - 2e-4, 1.0 - 1e-4});

    for (int trial = 0; trial < 10; ++trial) {
        const int d = ddist(rng);
        const MatrixXcd q = random_unitary(d, rng);
        Eigen::VectorXd cs(d), phis(d);
        Eigen::MatrixXd pcoef(d, 2);
        for (int j = 0; j < d; ++j) {
            cs(j) = cdist(rng);
            phis(j) = pdist(rng);
            pcoef(j, 0) = adist(rng);
            pcoef(j, 1) = adist(rng);
        }
        const MatrixXcd cmat = q * cs.asDiagonal() * q.adjoint();
        MatrixXcd wdiag = MatrixXcd::Zero(d, d);
        for (int j = 0; j < d; ++j) wdiag(j, j) = std::polar(1.0, phis(j));
        const MatrixXcd wmat = q * wdiag * q.adjoint();
        auto a_i = [q, pcoef, d](double t) -> MatrixXcd {
            Eigen::VectorXd diag(d);
            for (int j = 0; j < d; ++j) diag(j) = pcoef(j, 0) + pcoef(j, 1) * t;
            return q * diag.asDiagonal() * q.adjoint();
        };
        WeightFunction weight = trial % 3 == 0   ? WeightFunction::constant(1.0)
                                : trial % 3 == 1 ? WeightFunction::power(2.0)
                                                 : WeightFunction::sine(2.0);
        NormalExtension ext(weight, ConstantOperator(cmat), a_i, wmat, 5e-4);

        for (int pt = 0; pt < 5; ++pt) {
            const int j = static_cast<int>(rng() % static_cast<std::uint64_t>(d));
            const int k = kdist(rng);
            const complexd lambda(cs(j), phis(j) + 2.0 * kPi * k);
            const VectorXcd f = q.col(j);

            auto u_at = [&](double t) -> VectorXcd {
                const complexd scale = std::exp((lambda - cs(j)) * t) / std::sqrt(weight(t));
                return ext.propagator().at(t) * (scale * f);
            };

            // finite-difference eigen-equation residual on the interior grid
            auto u_fd = sample(u_at, fd_nodes);
            double eig_residual = 0.0;
            for (std::size_t i = 0; i < fd_nodes.size(); ++i) {
                const std::size_t s = stencil_start(i, fd_nodes.size());
                const auto wts = fd_weights(fd_nodes[i],
                                            std::span<const double>(fd_nodes.data() + s, 5), 1);
                VectorXcd du = VectorXcd::Zero(d);
                for (std::size_t l = 0; l < 5; ++l)
                    du += wts[l] * u_fd.values.col(static_cast<Eigen::Index>(s + l));
                const double t = fd_nodes[i];
                const MatrixXcd a_full = (0.5 * weight.log_derivative(t)) * MatrixXcd::Identity(d, d) +
                                         cmat + complexd(0, 1) * a_i(t);
                const VectorXcd resid =
                    du + a_full * u_fd.values.col(static_cast<Eigen::Index>(i)) -
                    lambda * u_fd.values.col(static_cast<Eigen::Index>(i));
                eig_residual = std::max(eig_residual, resid.norm());
            }
            worst_eig = std::max(worst_eig, eig_residual);

            const double br = boundary_residual(ext, sample(u_at, trace_nodes));
            worst_boundary = std::max(worst_boundary, br);
        }
    }
    ok = worst_eig <= 1e-6 && worst_boundary <= 1e-6;
    record(7, "eigenfunction certificate (10 random extensions, 5 lattice points each)", ok,
           "eigen-eq residual " + fmt(worst_eig) + ", boundary residual " + fmt(worst_boundary));
}

// ---------------------------------------------------------------------------
// 8. resolvent-difference diagnostic: algebraic-decay family transfers its
//    exponent (within 0.1), rank-bounded family has <= 2 nonzero values
void criterion8() {
    bool ok = true;
    const int d = 32;
    MatrixXcd w2 = MatrixXcd::Zero(d, d);
    for (int j = 1; j <= d; ++j) w2(j - 1, j - 1) = std::polar(1.0, 1.0 / (j * j));
    NormalExtension e1(WeightFunction::constant(1.0), ConstantOperator(MatrixXcd::Identity(d, d)),
                       nullptr, MatrixXcd::Identity(d, d));
    NormalExtension e2(WeightFunction::constant(1.0), ConstantOperator(MatrixXcd::Identity(d, d)),
                       nullptr, w2);
    const auto diag = resolvent_difference_diagnostic(e1, e2, complexd(-1.0, 0.0), 64);
    const bool fits = diag.resolvent_fit && diag.w_fit && diag.exponent_gap;
    ok = ok && fits && *diag.exponent_gap <= 0.1;

    MatrixXcd rot(2, 2);
    rot << std::cos(0.5), -std::sin(0.5), std::sin(0.5), std::cos(0.5);
    NormalExtension r1(WeightFunction::constant(1.0), ConstantOperator::diagonal({0.8, 0.8}),
                       nullptr, MatrixXcd::Identity(2, 2));
    NormalExtension r2(WeightFunction::constant(1.0), ConstantOperator::diagonal({0.8, 0.8}),
                       nullptr, rot);
    const auto rankdiag = resolvent_difference_diagnostic(r1, r2, complexd(-1.0, 0.0), 64);
    int nonzero = 0;
    for (double v : rankdiag.resolvent_diff.values)
        if (v > 1e-10) ++nonzero;
    ok = ok && nonzero <= 2;

    record(8, "resolvent-difference diagnostic (decay transfer and rank bound)", ok,
           (fits ? "exponent gap " + fmt(*diag.exponent_gap) : std::string("fits missing")) +
               ", rank-case nonzero " + std::to_string(nonzero));
}

} // namespace

int main() {
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();

    bool all = true;
    for (const auto& c : results) {
        std::printf("[%s] criterion %d: %s (%s)\n", c.passed ? "PASS" : "FAIL", c.id,
                    c.title.c_str(), c.detail.c_str());
        all = all && c.passed;
    }
    std::printf("%s\n", all ? "acceptance: all criteria hold" : "acceptance: FAILURES present");
    return all ? 0 : 1;
}
