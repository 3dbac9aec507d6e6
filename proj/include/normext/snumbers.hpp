#pragma once

//
// snumbers.hpp — singular values of the inverse extension, decay-exponent
// fits, Schatten summability verdicts, and the resolvent-difference
// diagnostic.
//
// The extension is normal, so the s-numbers of its inverse are exactly the
// reciprocal moduli of the lattice eigenvalues; enumeration is exact and the
// only approximation anywhere in the asymptotic fits is the fit itself. The
// discretized-SVD path exists solely inside the resolvent-difference
// diagnostic, where no closed form is available.
//

#include <optional>

#include "normext/spectral.hpp"

namespace normext {

enum class SingularSource { Lattice, DiscretizedSvd };

struct SingularSequence {
    std::vector<double> values; // non-increasing; strictly positive when source == Lattice
    SingularSource source;

    SingularSequence(std::vector<double> v, SingularSource s) : values(std::move(v)), source(s) {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (source == SingularSource::Lattice && !(values[i] > 0.0))
                throw ParameterError("SingularSequence: lattice s-numbers must be positive");
            if (values[i] < 0.0) throw ParameterError("SingularSequence: negative singular value");
            if (i > 0 && values[i] > values[i - 1] * (1.0 + 1e-14))
                throw ParameterError("SingularSequence: values must be non-increasing");
        }
    }

    std::size_t size() const { return values.size(); }
};

namespace detail {

inline void require_invertible(const std::vector<LatticeBranch>& branches) {
    for (const auto& b : branches) {
        const int k = static_cast<int>(std::llround(b.theta / (2.0 * std::numbers::pi)));
        for (int kk = k - 1; kk <= k + 1; ++kk) {
            const complexd lam(b.rho, 2.0 * std::numbers::pi * kk - b.theta);
            if (std::abs(lam) < 1e-12)
                throw InverseUndefinedError("0 is a lattice point; the inverse does not exist");
        }
    }
}

// number of lattice points with |lambda| <= r (pure counting, no allocation)
inline std::size_t count_below(const std::vector<LatticeBranch>& branches, double r) {
    std::size_t count = 0;
    for (const auto& b : branches) {
        if (std::abs(b.rho) > r) continue;
        const double band = std::sqrt(r * r - b.rho * b.rho);
        // |2 k pi - theta| <= band
        const int klo = static_cast<int>(std::ceil((b.theta - band) / (2.0 * std::numbers::pi) - 1e-15));
        const int khi = static_cast<int>(std::floor((b.theta + band) / (2.0 * std::numbers::pi) + 1e-15));
        if (khi >= klo) count += static_cast<std::size_t>(khi - klo + 1);
    }
    return count;
}

} // namespace detail

// m leading s-numbers of the inverse extension: enumerate lattice points of
// growing modulus and return the m largest reciprocals.
inline SingularSequence lattice_singular_values(const std::vector<LatticeBranch>& branches, int m) {
    if (m < 1) throw ParameterError("lattice_singular_values: count must be positive");
    detail::require_invertible(branches);

    double r = 4.0 * std::numbers::pi;
    while (detail::count_below(branches, r) < static_cast<std::size_t>(m)) r *= 2.0;

    std::vector<double> moduli;
    moduli.reserve(detail::count_below(branches, r));
    for (const auto& b : branches) {
        if (std::abs(b.rho) > r) continue;
        const double band = std::sqrt(r * r - b.rho * b.rho);
        const int klo = static_cast<int>(std::ceil((b.theta - band) / (2.0 * std::numbers::pi) - 1e-15));
        const int khi = static_cast<int>(std::floor((b.theta + band) / (2.0 * std::numbers::pi) + 1e-15));
        for (int k = klo; k <= khi; ++k)
            moduli.push_back(std::hypot(b.rho, 2.0 * std::numbers::pi * k - b.theta));
    }
    std::sort(moduli.begin(), moduli.end());
    moduli.resize(static_cast<std::size_t>(m));
    std::vector<double> s(moduli.size());
    for (std::size_t i = 0; i < moduli.size(); ++i) s[i] = 1.0 / moduli[i];
    return SingularSequence(std::move(s), SingularSource::Lattice);
}

inline SingularSequence lattice_singular_values(const NormalExtension& ext, int m) {
    // the joint-diagonalization branch data avoids e^{-C}, which underflows
    // for growth models with large lambda_n(C)
    return lattice_singular_values(detail::branches_from_joint_diagonalization(ext), m);
}

// #points with |lambda| <= max_j rho_j: beyond this radius the largest branch
// stops feeding new points and the counting law changes slope.
inline std::size_t saturation_count(const std::vector<LatticeBranch>& branches) {
    double rmax = 0.0;
    for (const auto& b : branches) rmax = std::max(rmax, std::abs(b.rho));
    return detail::count_below(branches, rmax);
}

struct IndexRange {
    std::size_t from; // 1-based, inclusive
    std::size_t to;
};

// Default policy: drop the first 10% (preasymptotic) and the last 5%
// (truncation-polluted). When branch data shows saturation inside the
// sequence, the window is capped below the saturation count.
inline IndexRange default_fit_range(const SingularSequence& s, std::size_t saturation = 0) {
    std::size_t len = s.size();
    if (saturation >= 200) len = std::min(len, saturation);
    IndexRange r{static_cast<std::size_t>(std::llround(0.10 * static_cast<double>(len))),
                 static_cast<std::size_t>(std::llround(0.95 * static_cast<double>(len)))};
    r.from = std::max<std::size_t>(r.from, 1);
    r.to = std::max(r.to, r.from + 1);
    r.to = std::min(r.to, s.size());
    return r;
}

struct DecayFit {
    double exponent;  // slope of ln s_n against ln n
    double prefactor; // exp(intercept)
    double r_squared;
};

namespace detail {

inline DecayFit loglog_fit(const std::vector<double>& values, std::size_t from, std::size_t to) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0, n = 0;
    for (std::size_t i = from; i <= to; ++i) {
        if (!(values[i - 1] > 0.0)) throw FitError("loglog_fit: non-positive value inside fit range");
        const double x = std::log(static_cast<double>(i)), y = std::log(values[i - 1]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        n += 1;
    }
    const double denom = n * sxx - sx * sx;
    if (denom <= 0.0) throw FitError("loglog_fit: degenerate abscissae");
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ymean = sy / n;
    for (std::size_t i = from; i <= to; ++i) {
        const double x = std::log(static_cast<double>(i)), y = std::log(values[i - 1]);
        const double yhat = slope * x + intercept;
        ss_res += (y - yhat) * (y - yhat);
        ss_tot += (y - ymean) * (y - ymean);
    }
    return DecayFit{slope, std::exp(intercept), ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0};
}

} // namespace detail

// Least-squares line through (ln n, ln s_n) over the 1-based inclusive range.
inline DecayFit fit_decay_exponent(const SingularSequence& s, IndexRange range) {
    if (s.size() < 50) throw SizeError("fit_decay_exponent: sequence shorter than 50");
    if (range.from < 1 || range.to > s.size() || range.from + 10 > range.to)
        throw FitError("fit_decay_exponent: degenerate fit range");
    return detail::loglog_fit(s.values, range.from, range.to);
}

struct SchattenReport {
    double partial_sum;
    double p_theta; // p times the fitted decay rate theta = -exponent
    enum class Verdict { Convergent, Divergent, Inconclusive } verdict;
};

// Sum_{n<=m} s_n^p plus a tail verdict from the fitted decay rate: the tail
// converges iff p*theta > 1, with a +-0.02 indeterminate band at the
// boundary.
inline SchattenReport schatten_p_report(const SingularSequence& s, double p,
                                        std::optional<DecayFit> fit = std::nullopt) {
    if (p < 1.0) throw ParameterError("schatten_p_report: p must be >= 1");
    if (s.size() < 100) throw SizeError("schatten_p_report: sequence shorter than 100");
    double sum = 0.0;
    for (double v : s.values) sum += std::pow(v, p);
    const DecayFit f = fit ? *fit : fit_decay_exponent(s, default_fit_range(s));
    const double ptheta = p * (-f.exponent);
    SchattenReport rep{sum, ptheta, SchattenReport::Verdict::Inconclusive};
    if (ptheta > 1.02) rep.verdict = SchattenReport::Verdict::Convergent;
    else if (ptheta < 0.98) rep.verdict = SchattenReport::Verdict::Divergent;
    return rep;
}

// Truncated emulation of a growth law lambda_n(C) = c n^beta: diagonal C on
// C^d with exactly those eigenvalues, W = I, unit weight, no imaginary part.
inline NormalExtension power_growth_extension(int d, double beta, double c = 1.0) {
    if (d < 1 || !(beta > 0.0) || !(c > 0.0))
        throw ParameterError("power_growth_extension: need d >= 1, beta > 0, c > 0");
    std::vector<double> diag(static_cast<std::size_t>(d));
    for (int j = 1; j <= d; ++j)
        diag[static_cast<std::size_t>(j - 1)] = c * std::pow(static_cast<double>(j), beta);
    return NormalExtension(WeightFunction::constant(1.0), ConstantOperator::diagonal(diag), nullptr,
                           MatrixXcd::Identity(d, d));
}

namespace detail {

// Structured solve of (T - lambda0) X = B for the forward-difference ring
// operator: T has diagonal blocks C - I/h, superdiagonal blocks I/h and the
// wrap block W/h at (N-1, 0). The corner is rank-d, so a bidiagonal
// back-substitution plus a Woodbury correction solves in O(N d^2) per column.
// adjoint = true solves (T - lambda0)^H X = B instead.
class RingResolventSolver {
  public:
    RingResolventSolver(const MatrixXcd& c, const MatrixXcd& w, int n, complexd lambda0, bool adjoint)
        : d_(static_cast<int>(c.rows())), n_(n), h_(1.0 / n), w_(w), adjoint_(adjoint) {
        MatrixXcd dblock = c - (1.0 / h_ + lambda0) * MatrixXcd::Identity(d_, d_);
        if (adjoint_) dblock.adjointInPlace();
        dlu_.compute(dblock);
        if (dlu_.rcond() < 1e-14)
            throw ResolventSingularityError("diagonal block of the shifted operator is singular");
        // A^{-1} U (plain) or A^{-H} V (adjoint): the chain of back/forward
        // substitutions applied to the corner factor
        MatrixXcd rhs = adjoint_ ? MatrixXcd::Identity(d_, d_) : MatrixXcd((w_ / h_).eval());
        chain_.resize(static_cast<std::size_t>(n_));
        MatrixXcd cur = dlu_.solve(rhs);
        for (int i = 0; i < n_; ++i) {
            chain_[static_cast<std::size_t>(adjoint_ ? i : n_ - 1 - i)] = cur;
            if (i + 1 < n_) cur = (-1.0 / h_) * dlu_.solve(cur).eval();
        }
        // inner d x d system of the Woodbury correction
        MatrixXcd inner = MatrixXcd::Identity(d_, d_);
        if (adjoint_)
            inner += (w_.adjoint() / h_) * chain_[static_cast<std::size_t>(n_ - 1)];
        else
            inner += chain_[0];
        innerlu_.compute(inner);
        if (innerlu_.rcond() < 1e-12)
            throw ResolventSingularityError("shifted operator is numerically singular");
    }

    // X: (N d) x k, column blocks indexed by grid node
    MatrixXcd solve(const MatrixXcd& b) const {
        MatrixXcd y = substitute(b);
        // correction: y - chain * inner^{-1} * (V^H y)
        MatrixXcd probe;
        if (adjoint_)
            probe = (w_.adjoint() / h_) * y.middleRows((n_ - 1) * d_, d_);
        else
            probe = y.topRows(d_);
        const MatrixXcd corr = innerlu_.solve(probe);
        MatrixXcd x = y;
        for (int i = 0; i < n_; ++i)
            x.middleRows(i * d_, d_) -= chain_[static_cast<std::size_t>(i)] * corr;
        return x;
    }

  private:
    // bidiagonal part only: back substitution (plain) or forward (adjoint)
    MatrixXcd substitute(const MatrixXcd& b) const {
        MatrixXcd x(b.rows(), b.cols());
        if (!adjoint_) {
            x.middleRows((n_ - 1) * d_, d_) = dlu_.solve(b.middleRows((n_ - 1) * d_, d_));
            for (int i = n_ - 2; i >= 0; --i)
                x.middleRows(i * d_, d_) =
                    dlu_.solve(b.middleRows(i * d_, d_) - x.middleRows((i + 1) * d_, d_) / h_);
        } else {
            x.topRows(d_) = dlu_.solve(b.topRows(d_));
            for (int i = 1; i < n_; ++i)
                x.middleRows(i * d_, d_) =
                    dlu_.solve(b.middleRows(i * d_, d_) - x.middleRows((i - 1) * d_, d_) / h_);
        }
        return x;
    }

    int d_, n_;
    double h_;
    MatrixXcd w_;
    bool adjoint_;
    Eigen::FullPivLU<MatrixXcd> dlu_;
    Eigen::FullPivLU<MatrixXcd> innerlu_;
    std::vector<MatrixXcd> chain_;
};

} // namespace detail

struct ResolventDiagnostic {
    SingularSequence resolvent_diff; // singular values of R1 - R2 (rank <= d, zeros omitted beyond)
    SingularSequence w_diff;         // singular values of W1 - W2
    std::optional<DecayFit> resolvent_fit;
    std::optional<DecayFit> w_fit;
    std::optional<double> exponent_gap;
};

// Discretized resolvent difference at lambda0 for two extensions sharing
// (alpha, C, A_i). The difference factors through the rank-d corner
// perturbation, R1 - R2 = R1 (T2 - T1) R2, so its singular values come from a
// d x d core after thin QR of the resolvent column/row blocks.
inline ResolventDiagnostic resolvent_difference_diagnostic(const NormalExtension& e1,
                                                           const NormalExtension& e2,
                                                           complexd lambda0, int n) {
    const int d = static_cast<int>(e1.dim());
    if (e2.dim() != d) throw ShapeError("resolvent diagnostic: dimension mismatch");
    if (n < 8 || n * d > 4096) throw SizeError("resolvent diagnostic: grid outside budget");
    require_valid(e1);
    require_valid(e2);

    const MatrixXcd& c = e1.constant().matrix();
    if ((c - e2.constant().matrix()).norm() > 1e-12 * (1.0 + c.norm()))
        throw ShapeError("resolvent diagnostic: extensions do not share C");
    if (e1.weight().kind() != e2.weight().kind() || e1.weight().param() != e2.weight().param())
        throw ShapeError("resolvent diagnostic: extensions do not share the weight");
    for (double t : {0.17, 0.53, 0.89})
        if ((e1.a_i()(t) - e2.a_i()(t)).norm() > 1e-12)
            throw ShapeError("resolvent diagnostic: extensions do not share A_i");

    // lambda0 must stay clear of both lattices
    for (const NormalExtension* e : {&e1, &e2}) {
        const auto branches = detail::branches_from_joint_diagonalization(*e);
        for (const auto& b : branches) {
            const int k0 = static_cast<int>(std::llround((lambda0.imag() + b.theta) / (2.0 * std::numbers::pi)));
            for (int k = k0 - 1; k <= k0 + 1; ++k) {
                const complexd lam(b.rho, 2.0 * std::numbers::pi * k - b.theta);
                if (std::abs(lam - lambda0) < 0.1)
                    throw ResolventSingularityError("lambda0 is within 0.1 of a lattice point");
            }
        }
    }

    const double h = 1.0 / n;
    const MatrixXcd dw = e2.boundary_unitary() - e1.boundary_unitary();

    // P = R1 columns hit by the corner, Z^H = leading row block of R2
    detail::RingResolventSolver s1(c, e1.boundary_unitary(), n, lambda0, /*adjoint=*/false);
    detail::RingResolventSolver s2(c, e2.boundary_unitary(), n, lambda0, /*adjoint=*/true);
    MatrixXcd elast = MatrixXcd::Zero(n * d, d);
    elast.bottomRows(d).setIdentity();
    MatrixXcd efirst = MatrixXcd::Zero(n * d, d);
    efirst.topRows(d).setIdentity();
    const MatrixXcd p = s1.solve(elast);
    const MatrixXcd z = s2.solve(efirst);

    Eigen::HouseholderQR<MatrixXcd> qrp(p), qrz(z);
    const MatrixXcd rp = qrp.matrixQR().topRows(d).triangularView<Eigen::Upper>();
    const MatrixXcd rz = qrz.matrixQR().topRows(d).triangularView<Eigen::Upper>();
    const MatrixXcd core = rp * (dw / h) * rz.adjoint();

    Eigen::JacobiSVD<MatrixXcd> svd_core(core);
    Eigen::JacobiSVD<MatrixXcd> svd_w(dw);
    std::vector<double> rs(svd_core.singularValues().data(),
                           svd_core.singularValues().data() + d);
    std::vector<double> ws(svd_w.singularValues().data(), svd_w.singularValues().data() + d);

    ResolventDiagnostic diag{SingularSequence(std::move(rs), SingularSource::DiscretizedSvd),
                             SingularSequence(std::move(ws), SingularSource::DiscretizedSvd),
                             std::nullopt, std::nullopt, std::nullopt};

    auto resolvable = [](const std::vector<double>& v) -> std::size_t {
        if (v.empty() || !(v.front() > 0.0)) return 0;
        std::size_t r = v.size();
        while (r > 0 && !(v[r - 1] > 1e-13 * v.front())) --r;
        return r;
    };
    const std::size_t r1 = resolvable(diag.resolvent_diff.values);
    const std::size_t r2 = resolvable(diag.w_diff.values);
    if (r1 >= 4) diag.resolvent_fit = detail::loglog_fit(diag.resolvent_diff.values, 1, r1);
    if (r2 >= 4) diag.w_fit = detail::loglog_fit(diag.w_diff.values, 1, r2);
    if (diag.resolvent_fit && diag.w_fit)
        diag.exponent_gap = std::abs(diag.resolvent_fit->exponent - diag.w_fit->exponent);
    return diag;
}

} // namespace normext
