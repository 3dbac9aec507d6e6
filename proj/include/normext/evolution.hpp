#pragma once

//
// evolution.hpp — the unitary evolution family U(t,s) solving
//
//     U_t'(t,s) + i A_i(t) U(t,s) = 0,   U(s,s) = I,
//
// for a Hermitian family A_i(t) on C^d. Stepping is midpoint-exponential:
// each factor exp(-i h A_i(t_mid)) is computed from the Hermitian
// eigendecomposition, so every step is unitary to roundoff and defects can
// only accumulate, never grow structurally.
//

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "normext/gridfn.hpp"

namespace normext {

// exp(-i dt H) for Hermitian H.
inline MatrixXcd unitary_exp_step(const MatrixXcd& h, double dt) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(h);
    VectorXcd phases(h.rows());
    for (Eigen::Index j = 0; j < h.rows(); ++j)
        phases(j) = std::polar(1.0, -dt * es.eigenvalues()(j));
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

class Propagator {
  public:
    using MatrixFn = std::function<MatrixXcd(double)>;

    Propagator(int dim, MatrixFn a_i, double step = 1e-3)
        : dim_(dim), a_i_(std::move(a_i)), step_(step) {
        if (dim_ < 1) throw ShapeError("Propagator: dimension must be positive");
        if (!(step_ > 0.0) || step_ > 1.0) throw ParameterError("Propagator: step must lie in (0,1]");
        zero_generator_ = !a_i_;
        if (!a_i_) a_i_ = [d = dim_](double) { return MatrixXcd::Zero(d, d); };
        build_cache();
    }

    int dim() const { return dim_; }
    double step() const { return step_; }
    std::size_t cache_size() const { return cache_.size(); }
    double cache_time(std::size_t k) const { return times_[k]; }
    const MatrixXcd& cached(std::size_t k) const { return cache_[k]; }

    // U(t,s); arguments may come in either order, U(t,s) = U(s,t)^*.
    MatrixXcd operator()(double s, double t) const {
        check_domain(s);
        check_domain(t);
        if (t == s) return MatrixXcd::Identity(dim_, dim_);
        if (t < s) return (*this)(t, s).adjoint();
        return march(s, t);
    }

    // U(t,0), accelerated by the cache: march only from the nearest cached
    // time at or below t, always stepping to the exact endpoint.
    MatrixXcd at(double t) const {
        check_domain(t);
        const auto k = static_cast<std::size_t>(std::floor(t / step_ + 1e-12));
        const std::size_t idx = std::min(k, cache_.size() - 1);
        const double tk = times_[idx];
        if (t == tk) return cache_[idx];
        return march(tk, t) * cache_[idx];
    }

    struct Report {
        double max_unitarity_defect;
        double max_cocycle_defect;
    };

    // Unitarity over all cached times; cocycle consistency over a coarse
    // probe set of ordered triples (s, r, t).
    Report unitarity_report() const {
        const MatrixXcd id = MatrixXcd::Identity(dim_, dim_);
        Report rep{0.0, 0.0};
        for (const auto& u : cache_)
            rep.max_unitarity_defect =
                std::max(rep.max_unitarity_defect, (u.adjoint() * u - id).norm());
        std::vector<double> probe;
        for (int i = 0; i <= 10; ++i) probe.push_back(i / 10.0);
        for (std::size_t a = 0; a < probe.size(); ++a)
            for (std::size_t b = a + 1; b < probe.size(); ++b)
                for (std::size_t c = b + 1; c < probe.size(); ++c) {
                    const double s = probe[a], r = probe[b], t = probe[c];
                    const MatrixXcd whole = (*this)(s, t);
                    const MatrixXcd split = (*this)(r, t) * (*this)(s, r);
                    rep.max_cocycle_defect = std::max(rep.max_cocycle_defect, (whole - split).norm());
                }
        return rep;
    }

  private:
    static void check_domain(double t) {
        if (!(t >= 0.0 && t <= 1.0)) throw DomainError("Propagator: time outside [0,1]");
    }

    // uniform substeps covering [s,t] exactly
    MatrixXcd march(double s, double t) const {
        if (zero_generator_) return MatrixXcd::Identity(dim_, dim_);
        const int n = std::max(1, static_cast<int>(std::ceil((t - s) / step_ - 1e-12)));
        const double h = (t - s) / n;
        MatrixXcd u = MatrixXcd::Identity(dim_, dim_);
        for (int j = 0; j < n; ++j)
            u = unitary_exp_step(a_i_(s + (j + 0.5) * h), h) * u;
        return u;
    }

    void build_cache() {
        const int k = static_cast<int>(std::ceil(1.0 / step_ - 1e-12));
        times_.resize(static_cast<std::size_t>(k) + 1);
        cache_.resize(static_cast<std::size_t>(k) + 1);
        times_[0] = 0.0;
        cache_[0] = MatrixXcd::Identity(dim_, dim_);
        for (int j = 1; j <= k; ++j) {
            const double t0 = times_[static_cast<std::size_t>(j - 1)];
            const double t1 = std::min(j * step_, 1.0);
            times_[static_cast<std::size_t>(j)] = t1;
            cache_[static_cast<std::size_t>(j)] =
                zero_generator_
                    ? cache_[0]
                    : (unitary_exp_step(a_i_(0.5 * (t0 + t1)), t1 - t0) * cache_[static_cast<std::size_t>(j - 1)])
                          .eval();
        }
    }

    int dim_;
    MatrixFn a_i_;
    bool zero_generator_ = false;
    double step_;
    std::vector<double> times_;
    std::vector<MatrixXcd> cache_;
};

} // namespace normext
