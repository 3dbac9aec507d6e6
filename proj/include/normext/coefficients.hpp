#pragma once

//
// coefficients.hpp — the operator coefficient A(t) = A_r(t) + i A_i(t) on C^d
// and the pointwise checks that tie it to an admissible weight.
//
// The central identity tested here: the minimal operator generated by
// u' + A(t)u in L^2_alpha is formally normal only if
//
//     A*(t)A(t) - A(t)A*(t) = d/dt ( 2A_r(t) - (alpha'/alpha)(t) I ),
//
// which for bounded normal coefficients pins the real part to
// A_r(t) = (alpha'/2alpha)(t) I + C with a constant positive C.
//

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "normext/weights.hpp"

namespace normext {

// Constant Hermitian positive-semidefinite matrix C. Construction rejects
// negative eigenvalues; the zero boundary is accepted (callers that invert C
// must require strict positivity themselves).
class ConstantOperator {
  public:
    explicit ConstantOperator(MatrixXcd c) : mat_(std::move(c)) {
        if (mat_.rows() != mat_.cols()) throw ShapeError("ConstantOperator: matrix not square");
        const double scale = 1.0 + mat_.norm();
        if ((mat_ - mat_.adjoint()).norm() > 1e-12 * scale)
            throw CoefficientError("ConstantOperator: matrix not Hermitian");
        mat_ = 0.5 * (mat_ + mat_.adjoint().eval());
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(mat_, Eigen::EigenvaluesOnly);
        min_eig_ = es.eigenvalues().minCoeff();
        if (min_eig_ < -1e-10 * scale)
            throw PositivityError("ConstantOperator: negative eigenvalue " + std::to_string(min_eig_));
    }

    static ConstantOperator diagonal(const std::vector<double>& entries) {
        MatrixXcd c = MatrixXcd::Zero(static_cast<Eigen::Index>(entries.size()),
                                      static_cast<Eigen::Index>(entries.size()));
        for (std::size_t i = 0; i < entries.size(); ++i)
            c(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = entries[i];
        return ConstantOperator(std::move(c));
    }

    const MatrixXcd& matrix() const { return mat_; }
    Eigen::Index dim() const { return mat_.rows(); }
    double min_eigenvalue() const { return min_eig_; }
    bool strictly_positive(double tol = 1e-12) const { return min_eig_ > tol; }

    // e^{-C} through the Hermitian eigendecomposition.
    MatrixXcd exp_neg() const {
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(mat_);
        return es.eigenvectors() * (-es.eigenvalues().array()).exp().matrix().asDiagonal() *
               es.eigenvectors().adjoint();
    }

  private:
    MatrixXcd mat_;
    double min_eig_;
};

enum class CoeffRepresentation { Constant, Polynomial, Tabulated };

// t -> A_r(t), A_i(t), both Hermitian and commuting at every sample; the
// hypotheses are enforced on a probe grid at construction.
class CoefficientPath {
  public:
    using MatrixFn = std::function<MatrixXcd(double)>;

    CoefficientPath(int dim, CoeffRepresentation rep, MatrixFn a_r, MatrixFn a_i,
                    std::span<const double> check_grid = {})
        : dim_(dim), rep_(rep), a_r_(std::move(a_r)), a_i_(std::move(a_i)) {
        if (dim_ < 1) throw ShapeError("CoefficientPath: dimension must be positive");
        std::vector<double> probe(check_grid.begin(), check_grid.end());
        if (probe.empty())
            for (int i = 0; i <= 32; ++i) probe.push_back(0.05 + 0.9 * i / 32.0);
        for (double t : probe) validate_sample(t);
    }

    static CoefficientPath constant(const MatrixXcd& ar, const MatrixXcd& ai) {
        const int d = static_cast<int>(ar.rows());
        return CoefficientPath(d, CoeffRepresentation::Constant,
                               [ar](double) { return ar; }, [ai](double) { return ai; });
    }

    static CoefficientPath scalar(std::function<double(double)> ar, std::function<double(double)> ai,
                                  CoeffRepresentation rep = CoeffRepresentation::Tabulated) {
        auto lift = [](std::function<double(double)> f) {
            return [f = std::move(f)](double t) { return MatrixXcd::Constant(1, 1, f(t)); };
        };
        return CoefficientPath(1, rep, lift(std::move(ar)), lift(std::move(ai)));
    }

    // Coefficient family with A_r(t) = (alpha'/2alpha)(t) I + C, the shape a
    // formally normal bounded coefficient must have.
    static CoefficientPath normal_form(const WeightFunction& w, const ConstantOperator& c,
                                       MatrixFn a_i) {
        const int d = static_cast<int>(c.dim());
        MatrixXcd cm = c.matrix();
        auto ar = [w, cm, d](double t) -> MatrixXcd {
            return 0.5 * w.log_derivative(t) * MatrixXcd::Identity(d, d) + cm;
        };
        if (!a_i) a_i = [d](double) { return MatrixXcd::Zero(d, d); };
        // the probe grid must avoid the weight zeros
        std::vector<double> probe;
        for (int i = 0; i <= 32; ++i) {
            const double t = 0.05 + 0.9 * i / 32.0;
            if (w.distance_to_zero_set(t) > 1e-3) probe.push_back(t);
        }
        return CoefficientPath(d, CoeffRepresentation::Tabulated, std::move(ar), std::move(a_i), probe);
    }

    int dim() const { return dim_; }
    CoeffRepresentation representation() const { return rep_; }

    MatrixXcd a_r(double t) const { return a_r_(t); }
    MatrixXcd a_i(double t) const { return a_i_(t); }
    MatrixXcd a(double t) const { return a_r_(t) + complexd(0, 1) * a_i_(t); }

  private:
    void validate_sample(double t) const {
        const MatrixXcd ar = a_r_(t), ai = a_i_(t);
        if (ar.rows() != dim_ || ar.cols() != dim_ || ai.rows() != dim_ || ai.cols() != dim_)
            throw ShapeError("CoefficientPath: sample dimension mismatch");
        const double sr = ar.norm(), si = ai.norm();
        if ((ar - ar.adjoint()).norm() > 1e-12 * (1.0 + sr) ||
            (ai - ai.adjoint()).norm() > 1e-12 * (1.0 + si))
            throw CoefficientError("CoefficientPath: Hermitian part violated at t=" + std::to_string(t));
        const double tol_comm = 1e-10 * (1.0 + sr * si);
        if ((ar * ai - ai * ar).norm() > tol_comm)
            throw CoefficientError("CoefficientPath: real and imaginary parts do not commute at t=" +
                                   std::to_string(t));
    }

    int dim_;
    CoeffRepresentation rep_;
    MatrixFn a_r_, a_i_;
};

// max over the grid of || [A*,A](t) - D_t(2A_r(t) - (alpha'/alpha)(t) I) ||_F
// with D_t a 4th-order finite difference (5-point stencils, one-sided at the
// grid ends). Zero residual is the formal-normality signature.
inline double normality_residual(const CoefficientPath& a, const WeightFunction& w,
                                 std::span<const double> grid) {
    const std::size_t n = grid.size();
    if (n < 5) throw InsufficientResolutionError("normality_residual: need at least 5 grid points");
    const int d = a.dim();
    const MatrixXcd id = MatrixXcd::Identity(d, d);

    std::vector<MatrixXcd> f(n), comm(n);
    for (std::size_t i = 0; i < n; ++i) {
        const MatrixXcd am = a.a(grid[i]);
        comm[i] = am.adjoint() * am - am * am.adjoint();
        f[i] = 2.0 * a.a_r(grid[i]) - w.log_derivative(grid[i]) * id;
    }

    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t s = stencil_start(i, n);
        const auto wts = fd_weights(grid[i], std::span<const double>(grid.data() + s, 5), 1);
        MatrixXcd df = MatrixXcd::Zero(d, d);
        for (std::size_t j = 0; j < 5; ++j) df += wts[j] * f[s + j];
        worst = std::max(worst, (comm[i] - df).norm());
    }
    return worst;
}

struct ConstantExtraction {
    ConstantOperator c;
    double max_deviation;          // max_t ||C(t) - mean||_F
    bool psd_boundary_warning;     // smallest eigenvalue within tolerance of zero
};

// Inverts A_r(t) = (alpha'/2alpha) I + C: forms C(t) = A_r(t) - (alpha'/2alpha)I
// per sample, averages, and rejects families where C(t) drifts.
inline ConstantExtraction extract_constant_C(const CoefficientPath& a, const WeightFunction& w,
                                             std::span<const double> grid) {
    if (grid.empty()) throw InsufficientResolutionError("extract_constant_C: empty grid");
    const int d = a.dim();
    const MatrixXcd id = MatrixXcd::Identity(d, d);
    MatrixXcd mean = MatrixXcd::Zero(d, d);
    std::vector<MatrixXcd> samples;
    samples.reserve(grid.size());
    for (double t : grid) {
        samples.push_back(a.a_r(t) - 0.5 * w.log_derivative(t) * id);
        mean += samples.back();
    }
    mean /= static_cast<double>(grid.size());
    double dev = 0.0;
    for (const auto& s : samples) dev = std::max(dev, (s - mean).norm());
    const double tol_const = 1e-6 * (1.0 + mean.norm());
    if (dev > tol_const)
        throw NotConstantFormError("extract_constant_C: C(t) deviates by " + std::to_string(dev));

    ConstantOperator c(mean); // throws PositivityError on a negative eigenvalue
    const bool boundary = !(c.min_eigenvalue() > 1e-10 * (1.0 + mean.norm()));
    return ConstantExtraction{std::move(c), dev, boundary};
}

// min over the grid of the smallest eigenvalue of A_r(t) - (alpha'/2alpha)(t) I.
// Nonnegative means the accretivity condition holds on the grid.
inline double accretivity_margin(const CoefficientPath& a, const WeightFunction& w,
                                 std::span<const double> grid) {
    if (grid.empty()) throw InsufficientResolutionError("accretivity_margin: empty grid");
    const int d = a.dim();
    const MatrixXcd id = MatrixXcd::Identity(d, d);
    double margin = std::numeric_limits<double>::infinity();
    for (double t : grid) {
        const MatrixXcd m = a.a_r(t) - 0.5 * w.log_derivative(t) * id;
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m, Eigen::EigenvaluesOnly);
        margin = std::min(margin, es.eigenvalues().minCoeff());
    }
    return margin;
}

} // namespace normext
