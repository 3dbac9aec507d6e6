#pragma once

//
// weights.hpp — admissible weight functions on [0,1] and the weighted
// quadrature that realizes the L^2_alpha inner product.
//
// A weight is nonnegative, twice differentiable for the built-in kinds, and
// vanishes only on a finite zero set. Quadrature is composite Gauss-Legendre
// with panels graded geometrically toward the zeros, where alpha'/alpha blows
// up while the integrals stay finite.
//

#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "normext/gridfn.hpp"

namespace normext {

enum class WeightKind { Constant, Power, ReflectedPower, Sine, Tabulated };

namespace detail {

// Monotone piecewise-cubic interpolant (Fritsch-Carlson slope limiting).
struct Pchip {
    std::vector<double> t, y, slope;

    void build() {
        const std::size_t n = t.size();
        std::vector<double> d(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i]) / (t[i + 1] - t[i]);
        slope.assign(n, 0.0);
        slope[0] = d[0];
        slope[n - 1] = d[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0) {
                slope[i] = 0.0;
            } else {
                const double w1 = 2.0 * (t[i + 1] - t[i]) + (t[i] - t[i - 1]);
                const double w2 = (t[i + 1] - t[i]) + 2.0 * (t[i] - t[i - 1]);
                slope[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        // clamp endpoint slopes to keep the interpolant monotone per interval
        if (slope[0] * d[0] < 0.0) slope[0] = 0.0;
        else if (std::abs(slope[0]) > 3.0 * std::abs(d[0])) slope[0] = 3.0 * d[0];
        if (slope[n - 1] * d[n - 2] < 0.0) slope[n - 1] = 0.0;
        else if (std::abs(slope[n - 1]) > 3.0 * std::abs(d[n - 2])) slope[n - 1] = 3.0 * d[n - 2];
    }

    std::size_t interval(double x) const {
        auto it = std::upper_bound(t.begin(), t.end(), x);
        std::size_t i = static_cast<std::size_t>(it - t.begin());
        if (i == 0) return 0;
        if (i >= t.size()) return t.size() - 2;
        return i - 1;
    }

    double eval(double x) const {
        const std::size_t i = interval(x);
        const double h = t[i + 1] - t[i], s = (x - t[i]) / h;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        const double h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s);
        const double h11 = s * s * (s - 1);
        return h00 * y[i] + h10 * h * slope[i] + h01 * y[i + 1] + h11 * h * slope[i + 1];
    }

    double deriv(double x) const {
        const std::size_t i = interval(x);
        const double h = t[i + 1] - t[i], s = (x - t[i]) / h;
        const double d00 = 6 * s * (s - 1) / h;
        const double d10 = (1 - s) * (1 - 3 * s);
        const double d01 = -d00;
        const double d11 = s * (3 * s - 2);
        return d00 * y[i] + d10 * slope[i] + d01 * y[i + 1] + d11 * slope[i + 1];
    }
};

} // namespace detail

class WeightFunction {
  public:
    static constexpr double tol_zero = 1e-12;

    static WeightFunction constant(double value = 1.0) {
        if (value <= 0.0) throw DomainError("constant weight must be positive");
        WeightFunction w(WeightKind::Constant, value);
        return w;
    }

    // alpha(t) = t^gamma, gamma >= 2; vanishes at t = 0.
    static WeightFunction power(double gamma) {
        require_exponent(gamma);
        WeightFunction w(WeightKind::Power, gamma);
        w.zeros_ = {0.0};
        return w;
    }

    // alpha(t) = (1-t)^delta, delta >= 2; vanishes at t = 1.
    static WeightFunction reflected_power(double delta) {
        require_exponent(delta);
        WeightFunction w(WeightKind::ReflectedPower, delta);
        w.zeros_ = {1.0};
        return w;
    }

    // alpha(t) = sin(pi t^gamma), gamma >= 2; vanishes at t = 0 and t = 1.
    static WeightFunction sine(double gamma) {
        require_exponent(gamma);
        WeightFunction w(WeightKind::Sine, gamma);
        w.zeros_ = {0.0, 1.0};
        return w;
    }

    static WeightFunction tabulated(std::vector<double> t, std::vector<double> a) {
        if (t.size() != a.size() || t.size() < 4)
            throw ShapeError("tabulated weight needs >= 4 matched samples");
        if (!std::is_sorted(t.begin(), t.end()))
            throw ShapeError("tabulated weight abscissae must be ascending");
        if (std::abs(t.front()) > tol_zero || std::abs(t.back() - 1.0) > tol_zero)
            throw DomainError("tabulated weight must cover [0,1]");
        WeightFunction w(WeightKind::Tabulated, 0.0);
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] < 0.0) throw DomainError("tabulated weight has a negative sample");
            if (a[i] == 0.0) {
                // interval zeros violate the measure-zero hypothesis
                if (i + 1 < a.size() && a[i + 1] == 0.0)
                    throw DomainError("tabulated weight vanishes on an interval");
                w.zeros_.push_back(t[i]);
            }
        }
        w.table_.t = std::move(t);
        w.table_.y = std::move(a);
        w.table_.build();
        // the monotone interpolant can still undershoot between non-monotone
        // samples; reject if it goes negative anywhere
        for (int i = 0; i <= 4096; ++i) {
            const double x = i / 4096.0;
            if (w.table_.eval(x) < -1e-14) throw DomainError("tabulated weight interpolant dips negative");
        }
        return w;
    }

    // Two-column CSV "t,alpha"; an optional header line is skipped.
    static WeightFunction tabulated_csv(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open weight table: " + path);
        std::vector<double> t, a;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream ls(line);
            double x, y;
            if (ls >> x >> y) {
                t.push_back(x);
                a.push_back(y);
            } else if (t.empty()) {
                continue; // header
            } else {
                throw IoError("malformed row in weight table: " + line);
            }
        }
        return tabulated(std::move(t), std::move(a));
    }

    WeightKind kind() const { return kind_; }
    double param() const { return param_; }
    const std::vector<double>& zero_set() const { return zeros_; }

    bool has_second_derivative() const { return kind_ != WeightKind::Tabulated; }

    double operator()(double t) const {
        check_domain(t);
        switch (kind_) {
            case WeightKind::Constant: return param_;
            case WeightKind::Power: return std::pow(t, param_);
            case WeightKind::ReflectedPower: return std::pow(1.0 - t, param_);
            case WeightKind::Sine: return std::sin(std::numbers::pi * std::pow(t, param_));
            case WeightKind::Tabulated: return table_.eval(t);
        }
        return 0.0;
    }

    double derivative(double t) const {
        check_domain(t);
        const double pi = std::numbers::pi;
        switch (kind_) {
            case WeightKind::Constant: return 0.0;
            case WeightKind::Power: return param_ * std::pow(t, param_ - 1.0);
            case WeightKind::ReflectedPower: return -param_ * std::pow(1.0 - t, param_ - 1.0);
            case WeightKind::Sine:
                return pi * param_ * std::pow(t, param_ - 1.0) * std::cos(pi * std::pow(t, param_));
            case WeightKind::Tabulated: return table_.deriv(t);
        }
        return 0.0;
    }

    double second_derivative(double t) const {
        check_domain(t);
        const double pi = std::numbers::pi;
        switch (kind_) {
            case WeightKind::Constant: return 0.0;
            case WeightKind::Power: return param_ * (param_ - 1.0) * std::pow(t, param_ - 2.0);
            case WeightKind::ReflectedPower:
                return param_ * (param_ - 1.0) * std::pow(1.0 - t, param_ - 2.0);
            case WeightKind::Sine: {
                const double u = pi * std::pow(t, param_);
                const double du = pi * param_ * std::pow(t, param_ - 1.0);
                const double ddu = pi * param_ * (param_ - 1.0) * std::pow(t, param_ - 2.0);
                return ddu * std::cos(u) - du * du * std::sin(u);
            }
            case WeightKind::Tabulated:
                throw Error("tabulated weights do not expose a second derivative");
        }
        return 0.0;
    }

    // alpha'(t)/alpha(t); closed form for the built-in kinds. Throws within
    // tol_zero of a zero, where double-precision cancellation dominates.
    double log_derivative(double t) const {
        check_domain(t);
        check_not_singular(t);
        const double pi = std::numbers::pi;
        switch (kind_) {
            case WeightKind::Constant: return 0.0;
            case WeightKind::Power: return param_ / t;
            case WeightKind::ReflectedPower: return -param_ / (1.0 - t);
            case WeightKind::Sine:
                return pi * param_ * std::pow(t, param_ - 1.0) / std::tan(pi * std::pow(t, param_));
            case WeightKind::Tabulated: return table_.deriv(t) / table_.eval(t);
        }
        return 0.0;
    }

    double distance_to_zero_set(double t) const {
        double d = std::numeric_limits<double>::infinity();
        for (double z : zeros_) d = std::min(d, std::abs(t - z));
        return d;
    }

  private:
    WeightFunction(WeightKind k, double p) : kind_(k), param_(p) {}

    static void require_exponent(double g) {
        if (!(g >= 2.0)) throw DomainError("weight exponent must be >= 2");
    }
    static void check_domain(double t) {
        if (!(t >= 0.0 && t <= 1.0)) throw DomainError("weight argument outside [0,1]");
    }
    void check_not_singular(double t) const {
        if (distance_to_zero_set(t) < tol_zero)
            throw SingularityError("log derivative requested within tol_zero of a weight zero");
    }

    WeightKind kind_;
    double param_;
    std::vector<double> zeros_;
    detail::Pchip table_;
};

namespace detail {

// 16-point Gauss-Legendre rule on [-1,1] (positive half; mirror for the rest).
inline constexpr std::array<double, 8> kGl16Nodes = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
inline constexpr std::array<double, 8> kGl16Weights = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

} // namespace detail

// Composite Gauss-Legendre rule on [0,1] whose panels are refined
// geometrically toward the weight's zeros. Nodes are strictly interior to
// their panels, so none lands on the zero set.
struct QuadratureGrid {
    std::vector<double> nodes;
    std::vector<double> weights;

    static QuadratureGrid for_weight(const WeightFunction& w, int base_panels = 64,
                                     int grading_depth = 20) {
        if (base_panels < 1) throw ParameterError("quadrature needs at least one panel");
        std::vector<double> edges;
        edges.reserve(static_cast<std::size_t>(base_panels) + 1);
        for (int i = 0; i <= base_panels; ++i) edges.push_back(static_cast<double>(i) / base_panels);
        for (double z : w.zero_set())
            if (z > 0.0 && z < 1.0) edges.push_back(z);
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

        // geometric refinement (ratio 1/2) of the panel on each side of a zero
        std::vector<double> refined;
        for (double z : w.zero_set()) {
            auto right = std::upper_bound(edges.begin(), edges.end(), z);
            if (right != edges.end() && right != edges.begin() && *(right - 1) <= z) {
                const double width = *right - z;
                if (width > 0.0)
                    for (int k = 1; k <= grading_depth; ++k) refined.push_back(z + std::ldexp(width, -k));
            }
            auto left = std::lower_bound(edges.begin(), edges.end(), z);
            if (left != edges.begin() && left != edges.end() && *left == z) {
                const double width = z - *(left - 1);
                if (width > 0.0)
                    for (int k = 1; k <= grading_depth; ++k) refined.push_back(z - std::ldexp(width, -k));
            }
        }
        edges.insert(edges.end(), refined.begin(), refined.end());
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

        QuadratureGrid g;
        g.nodes.reserve((edges.size() - 1) * 16);
        g.weights.reserve((edges.size() - 1) * 16);
        for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
            const double a = edges[p], b = edges[p + 1];
            const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
            if (half <= 0.0) continue;
            for (int i = 7; i >= 0; --i) {
                g.nodes.push_back(mid - half * detail::kGl16Nodes[static_cast<std::size_t>(i)]);
                g.weights.push_back(half * detail::kGl16Weights[static_cast<std::size_t>(i)]);
            }
            for (int i = 0; i < 8; ++i) {
                g.nodes.push_back(mid + half * detail::kGl16Nodes[static_cast<std::size_t>(i)]);
                g.weights.push_back(half * detail::kGl16Weights[static_cast<std::size_t>(i)]);
            }
        }
        return g;
    }

    std::size_t size() const { return nodes.size(); }
};

// int_0^1 <u(t), v(t)>_H alpha(t) dt by composite quadrature; linear in u,
// conjugate-linear in v, so ip(u,v) = conj(ip(v,u)).
inline complexd weighted_inner_product(const GridFunction& u, const GridFunction& v,
                                       const WeightFunction& w, const QuadratureGrid& grid) {
    if (u.size() != grid.size() || v.size() != grid.size())
        throw ShapeError("weighted_inner_product: functions not sampled on the quadrature grid");
    if (u.dim() != v.dim()) throw ShapeError("weighted_inner_product: dimension mismatch");
    for (std::size_t q = 0; q < grid.size(); ++q)
        if (u.nodes[q] != grid.nodes[q] || v.nodes[q] != grid.nodes[q])
            throw ShapeError("weighted_inner_product: node mismatch");
    complexd acc = 0.0;
    for (std::size_t q = 0; q < grid.size(); ++q) {
        const auto qi = static_cast<Eigen::Index>(q);
        // v.dot(u) = sum_i conj(v_i) u_i, linear in u
        acc += grid.weights[q] * w(grid.nodes[q]) * v.values.col(qi).dot(u.values.col(qi));
    }
    return acc;
}

inline double weighted_norm_sq(const GridFunction& u, const WeightFunction& w,
                               const QuadratureGrid& grid) {
    return weighted_inner_product(u, u, w, grid).real();
}

// Chebyshev-spaced sample grid on [0,1] with neighborhoods of the weight's
// zeros excluded. Used for pointwise residual checks, not quadrature.
inline std::vector<double> residual_grid(const WeightFunction& w, int n = 257,
                                         double exclusion = 1e-2) {
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = 0.5 * (1.0 - std::cos(std::numbers::pi * i / (n - 1)));
        if (w.distance_to_zero_set(t) > exclusion) g.push_back(t);
    }
    if (g.size() < 5) throw InsufficientResolutionError("residual_grid: fewer than 5 usable points");
    return g;
}

} // namespace normext
