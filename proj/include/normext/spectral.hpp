#pragma once

//
// spectral.hpp — closed-form spectrum lattice of a normal extension and an
// independent discretized-eigenvalue oracle.
//
// Closed form: with mu_j the eigenvalues of W* e^{-C}, the spectrum is the
// lattice
//
//     lambda_{j,k} = ln|mu_j|^{-1} + i (2 k pi - arg mu_j),   k integer.
//
// Because CW = WC, the same lattice arises from simultaneous diagonalization
// of C and W (branch pairs (lambda_j(C), phase of W on that eigenspace)); the
// two routes are computed independently and compared.
//
// Oracle: forward one-sided differences for u' + Cu on a uniform N-point
// grid, the boundary condition u_N = W u_0 folded into the wrap row. For the
// scalar case the assembled matrix is a I + b P with P a phase-twisted cyclic
// shift, which is normal; its eigenvalues are computed from the twisted-root
// candidates and certified by per-eigenvalue residuals against the assembled
// entries (for normal matrices the residual bounds the eigenvalue distance).
// Everything else goes through LAPACK's dense nonsymmetric eigensolver.
//

#include <complex>

#define LAPACK_COMPLEX_CUSTOM
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <numbers>
#include <vector>

#include "normext/extensions.hpp"

namespace normext {

inline double wrap_angle(double x) {
    const double pi = std::numbers::pi;
    double r = std::fmod(x, 2.0 * pi);
    if (r <= -pi) r += 2.0 * pi;
    if (r > pi) r -= 2.0 * pi;
    return r;
}

inline double angle_distance(double a, double b) { return std::abs(wrap_angle(a - b)); }

struct KWindow {
    int k_min;
    int k_max;
};

struct LatticeBranch {
    double rho;    // ln |mu|^{-1}
    double theta;  // arg mu in (-pi, pi]
    bool operator==(const LatticeBranch&) const = default;
};

struct LatticePoint {
    complexd lambda;
    int branch;
    int k;
};

class SpectrumLattice {
  public:
    SpectrumLattice(std::vector<LatticeBranch> branches, KWindow window)
        : branches_(std::move(branches)), window_(window) {
        if (window_.k_min > window_.k_max) throw WindowError("SpectrumLattice: empty k window");
        if (branches_.empty()) throw WindowError("SpectrumLattice: no branches");
        std::sort(branches_.begin(), branches_.end(), [](const auto& a, const auto& b) {
            return a.rho != b.rho ? a.rho < b.rho : a.theta < b.theta;
        });
    }

    const std::vector<LatticeBranch>& branches() const { return branches_; }
    const KWindow& window() const { return window_; }

    complexd point(std::size_t branch, int k) const {
        const auto& b = branches_[branch];
        return complexd(b.rho, 2.0 * std::numbers::pi * k - b.theta);
    }

    std::vector<LatticePoint> enumerate() const {
        std::vector<LatticePoint> pts;
        pts.reserve(branches_.size() * static_cast<std::size_t>(window_.k_max - window_.k_min + 1));
        for (std::size_t j = 0; j < branches_.size(); ++j)
            for (int k = window_.k_min; k <= window_.k_max; ++k)
                pts.push_back({point(j, k), static_cast<int>(j), k});
        return pts;
    }

  private:
    std::vector<LatticeBranch> branches_;
    KWindow window_;
};

namespace detail {

// Branch data via the direct route: eigenvalues of W* e^{-C}.
inline std::vector<LatticeBranch> branches_from_product(const NormalExtension& ext) {
    const MatrixXcd m = ext.boundary_unitary().adjoint() * ext.constant().exp_neg();
    Eigen::ComplexEigenSolver<MatrixXcd> es(m, /*computeEigenvectors=*/false);
    std::vector<LatticeBranch> branches;
    branches.reserve(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index j = 0; j < m.rows(); ++j) {
        const complexd mu = es.eigenvalues()(j);
        if (std::abs(mu) == 0.0)
            throw DegenerateSpectrumError("eigenvalue of W* e^{-C} vanished; corrupt input");
        branches.push_back({-std::log(std::abs(mu)), std::arg(mu)});
    }
    return branches;
}

// Branch data via simultaneous diagonalization: eigenvalues of C paired with
// the phases of W restricted to the corresponding eigenspaces.
inline std::vector<LatticeBranch> branches_from_joint_diagonalization(const NormalExtension& ext) {
    const MatrixXcd& c = ext.constant().matrix();
    const MatrixXcd& w = ext.boundary_unitary();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(c);
    const auto& evals = es.eigenvalues();
    const MatrixXcd& q = es.eigenvectors();
    const double tol = 1e-9 * (1.0 + c.norm());

    std::vector<LatticeBranch> branches;
    Eigen::Index j = 0;
    while (j < evals.size()) {
        Eigen::Index j2 = j + 1;
        while (j2 < evals.size() && evals(j2) - evals(j) < tol) ++j2;
        const Eigen::Index width = j2 - j;
        const MatrixXcd qc = q.middleCols(j, width);
        const MatrixXcd wsub = qc.adjoint() * w * qc; // unitary block since CW = WC
        Eigen::ComplexEigenSolver<MatrixXcd> ws(wsub, false);
        const double cmean = evals.segment(j, width).mean();
        for (Eigen::Index l = 0; l < width; ++l) {
            const complexd nu = ws.eigenvalues()(l); // e^{i phase} on this eigenspace
            branches.push_back({cmean, wrap_angle(-std::arg(nu))});
        }
        j = j2;
    }
    return branches;
}

// Greedy branch matching by (|d rho| + angular distance); returns the worst
// matched discrepancy.
inline double branch_discrepancy(std::vector<LatticeBranch> a, std::vector<LatticeBranch> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    std::vector<bool> used(b.size(), false);
    for (const auto& ba : a) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = b.size();
        for (std::size_t i = 0; i < b.size(); ++i) {
            if (used[i]) continue;
            const double d = std::abs(ba.rho - b[i].rho) + angle_distance(ba.theta, b[i].theta);
            if (d < best) {
                best = d;
                arg = i;
            }
        }
        used[arg] = true;
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace detail

struct ClosedFormSpectrum {
    SpectrumLattice lattice;
    // worst disagreement between the two closed-form routes (product
    // eigenvalues vs simultaneous diagonalization)
    double cross_check_defect;
};

inline ClosedFormSpectrum closed_form_spectrum(const NormalExtension& ext, KWindow window) {
    require_valid(ext);
    auto direct = detail::branches_from_product(ext);
    auto joint = detail::branches_from_joint_diagonalization(ext);
    const double defect = detail::branch_discrepancy(direct, joint);
    return {SpectrumLattice(std::move(direct), window), defect};
}

// max over enumerated lattice points of the normalized characteristic
// residual prod_j |mu_j - e^{-lambda}| / (|mu_j| + |e^{-lambda}|).
inline double lattice_determinant_defect(const NormalExtension& ext, const SpectrumLattice& lat) {
    const MatrixXcd m = ext.boundary_unitary().adjoint() * ext.constant().exp_neg();
    Eigen::ComplexEigenSolver<MatrixXcd> es(m, false);
    double worst = 0.0;
    for (const auto& pt : lat.enumerate()) {
        const complexd z = std::exp(-pt.lambda);
        double val = 1.0;
        for (Eigen::Index j = 0; j < m.rows(); ++j) {
            const complexd mu = es.eigenvalues()(j);
            val *= std::abs(mu - z) / (std::abs(mu) + std::abs(z));
        }
        worst = std::max(worst, val);
    }
    return worst;
}

namespace detail {

// Certified eigensolve of the scalar ring matrix with entries
//   T[i][i] = c - 1/h,  T[i][i+1] = 1/h,  T[N-1][0] = w/h,  h = 1/N.
// Candidates come from the twisted roots z^N = w; each candidate pair is
// certified by an explicit residual against the assembled entries. For this
// normal matrix min_k |lambda_k - mu| <= ||T v - mu v|| / ||v||, and N
// certified candidates separated by more than twice the residual bound
// exhaust the spectrum.
inline bool scalar_ring_eigenvalues(double c, complexd w, int n, std::vector<complexd>& out) {
    const double h = 1.0 / n;
    const complexd diag(c - 1.0 / h, 0.0);
    const complexd super(1.0 / h, 0.0);
    const complexd corner = w / h;
    const double arg0 = std::arg(w);

    std::vector<complexd> candidates(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        candidates[static_cast<std::size_t>(k)] =
            diag + super * std::polar(1.0, (arg0 + 2.0 * std::numbers::pi * k) / n);

    double max_residual = 0.0;
    std::vector<complexd> v(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const complexd z = std::polar(1.0, (arg0 + 2.0 * std::numbers::pi * k) / n);
        v[0] = 1.0;
        for (int i = 1; i < n; ++i) v[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i - 1)] * z;
        const complexd lam = candidates[static_cast<std::size_t>(k)];
        double rsq = 0.0;
        for (int i = 0; i < n; ++i) {
            const complexd next = (i + 1 < n) ? super * v[static_cast<std::size_t>(i + 1)] : corner * v[0];
            const complexd row = diag * v[static_cast<std::size_t>(i)] + next - lam * v[static_cast<std::size_t>(i)];
            rsq += std::norm(row);
        }
        max_residual = std::max(max_residual, std::sqrt(rsq / n)); // ||v|| = sqrt(n)
    }

    // adjacent twisted roots realize the minimal candidate separation
    const double separation = 2.0 * std::sin(std::numbers::pi / n) / h;
    if (max_residual > 1e-6 || separation <= 100.0 * std::max(max_residual, 1e-300)) return false;

    out = std::move(candidates);
    return true;
}

// LAPACK zgeev on the assembled dense matrix (eigenvalues only).
inline std::vector<complexd> dense_eigenvalues(std::vector<complexd>& colmajor, int n) {
    std::vector<complexd> evals(static_cast<std::size_t>(n));
    const int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, colmajor.data(), n, evals.data(),
                                   nullptr, 1, nullptr, 1);
    if (info != 0) throw Error("zgeev failed with info " + std::to_string(info));
    return evals;
}

inline bool is_exactly_diagonal(const MatrixXcd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (i != j && m(i, j) != complexd(0.0, 0.0)) return false;
    return true;
}

} // namespace detail

// Dense (N d) x (N d) forward-difference matrix for u' + C u with the wrap
// row implementing u_N = W u_0, stored column-major.
inline std::vector<complexd> discrete_operator_entries(const NormalExtension& ext, int n) {
    const int d = static_cast<int>(ext.dim());
    const int size = n * d;
    const double h = 1.0 / n;
    std::vector<complexd> a(static_cast<std::size_t>(size) * size, complexd(0.0, 0.0));
    auto at = [&](int r, int col) -> complexd& {
        return a[static_cast<std::size_t>(col) * size + r];
    };
    const MatrixXcd& c = ext.constant().matrix();
    const MatrixXcd& w = ext.boundary_unitary();
    for (int i = 0; i < n; ++i)
        for (int r = 0; r < d; ++r) {
            for (int s = 0; s < d; ++s) at(i * d + r, i * d + s) += c(r, s);
            at(i * d + r, i * d + r) += -1.0 / h;
            if (i + 1 < n)
                at(i * d + r, (i + 1) * d + r) += 1.0 / h;
            else
                for (int s = 0; s < d; ++s) at(i * d + r, s) += w(r, s) / h;
        }
    return a;
}

// All eigenvalues of the discretized operator. Only eigenvalues with
// |Im lambda| below about 0.2/h track the continuum; filtering is left to
// the matching step.
inline std::vector<complexd> discretized_spectrum(const NormalExtension& ext, int n) {
    if (n < 64) throw SizeError("discretized_spectrum: N must be at least 64");
    const int d = static_cast<int>(ext.dim());
    if (n * d > 4096) throw SizeError("discretized_spectrum: N*d exceeds the dense budget 4096");
    require_valid(ext);

    const MatrixXcd& c = ext.constant().matrix();
    const MatrixXcd& w = ext.boundary_unitary();

    // certified fast path: scalar, or exactly-diagonal data that decouples
    // into scalar rings
    if (detail::is_exactly_diagonal(c) && detail::is_exactly_diagonal(w)) {
        std::vector<complexd> all;
        all.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(d));
        bool ok = true;
        for (int j = 0; j < d && ok; ++j) {
            std::vector<complexd> part;
            ok = detail::scalar_ring_eigenvalues(c(j, j).real(), w(j, j), n, part);
            if (ok) all.insert(all.end(), part.begin(), part.end());
        }
        if (ok) return all;
    }

    auto entries = discrete_operator_entries(ext, n);
    return detail::dense_eigenvalues(entries, n * d);
}

// Same oracle, forced through the dense LAPACK path (used to cross-check the
// certified route in tests).
inline std::vector<complexd> discretized_spectrum_dense(const NormalExtension& ext, int n) {
    if (n < 64) throw SizeError("discretized_spectrum: N must be at least 64");
    const int d = static_cast<int>(ext.dim());
    if (n * d > 4096) throw SizeError("discretized_spectrum: N*d exceeds the dense budget 4096");
    require_valid(ext);
    auto entries = discrete_operator_entries(ext, n);
    return detail::dense_eigenvalues(entries, n * d);
}

struct MatchReport {
    // worst matched distance, relative to 1 + |lattice point|
    double max_pairing_distance;
    int unmatched_count;
    int matched_count;
};

// Greedy nearest-neighbor pairing of lattice points against discretized
// eigenvalues. Distances are relative to (1 + |lattice point|): the
// first-order scheme has symbol error ~ (Im lambda)^2 h / 2, so the absolute
// error grows quadratically across the window while the relative error stays
// O(h). Pairs farther than match_tol leave the lattice point unmatched.
inline MatchReport match_spectra(const std::vector<LatticePoint>& lattice,
                                 const std::vector<complexd>& discrete, double im_trust_cutoff,
                                 double match_tol = 0.25) {
    if (lattice.empty()) throw WindowError("match_spectra: empty lattice window");
    double im_lo = std::numeric_limits<double>::infinity(), im_hi = -im_lo;
    for (const auto& p : lattice) {
        im_lo = std::min(im_lo, p.lambda.imag());
        im_hi = std::max(im_hi, p.lambda.imag());
    }
    const double pi = std::numbers::pi;
    std::vector<complexd> trusted;
    for (const complexd& z : discrete)
        if (std::abs(z.imag()) <= im_trust_cutoff && z.imag() >= im_lo - pi && z.imag() <= im_hi + pi)
            trusted.push_back(z);

    struct Pair {
        double dist;
        std::size_t li, di;
    };
    std::vector<Pair> pairs;
    pairs.reserve(lattice.size() * trusted.size());
    for (std::size_t li = 0; li < lattice.size(); ++li)
        for (std::size_t di = 0; di < trusted.size(); ++di) {
            const double dist =
                std::abs(trusted[di] - lattice[li].lambda) / (1.0 + std::abs(lattice[li].lambda));
            if (dist <= match_tol) pairs.push_back({dist, li, di});
        }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.dist < b.dist; });

    std::vector<bool> lused(lattice.size(), false), dused(trusted.size(), false);
    MatchReport rep{0.0, 0, 0};
    for (const auto& p : pairs) {
        if (lused[p.li] || dused[p.di]) continue;
        lused[p.li] = dused[p.di] = true;
        rep.max_pairing_distance = std::max(rep.max_pairing_distance, p.dist);
        ++rep.matched_count;
    }
    rep.unmatched_count = static_cast<int>(lattice.size()) - rep.matched_count;
    return rep;
}

} // namespace normext
