#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "normext/errors.hpp"

namespace normext {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using complexd = std::complex<double>;

// A vector-valued function sampled on a sorted grid in [0,1].
// values.col(q) holds the H-vector at nodes[q].
struct GridFunction {
    std::vector<double> nodes;
    MatrixXcd values;

    GridFunction() = default;
    GridFunction(std::vector<double> t, MatrixXcd v) : nodes(std::move(t)), values(std::move(v)) {
        if (static_cast<Eigen::Index>(nodes.size()) != values.cols())
            throw ShapeError("GridFunction: node count does not match value columns");
        if (!std::is_sorted(nodes.begin(), nodes.end()))
            throw ShapeError("GridFunction: nodes must be ascending");
    }

    Eigen::Index dim() const { return values.rows(); }
    std::size_t size() const { return nodes.size(); }
};

// Sample a callable t -> H-vector on the given nodes.
inline GridFunction sample(const std::function<VectorXcd(double)>& f, std::vector<double> nodes) {
    if (nodes.empty()) throw ShapeError("sample: empty node list");
    VectorXcd first = f(nodes.front());
    MatrixXcd vals(first.size(), static_cast<Eigen::Index>(nodes.size()));
    vals.col(0) = first;
    for (std::size_t q = 1; q < nodes.size(); ++q) vals.col(static_cast<Eigen::Index>(q)) = f(nodes[q]);
    return GridFunction(std::move(nodes), std::move(vals));
}

// Scalar convenience overload.
inline GridFunction sample_scalar(const std::function<complexd(double)>& f, std::vector<double> nodes) {
    return sample([&](double t) { return VectorXcd::Constant(1, f(t)); }, std::move(nodes));
}

// Finite-difference weights for the m-th derivative at x0 from the nodes x
// (Fornberg's recursion; exact for polynomials of degree < x.size()).
inline std::vector<double> fd_weights(double x0, std::span<const double> x, int m) {
    const int n = static_cast<int>(x.size());
    if (n < m + 1) throw InsufficientResolutionError("fd_weights: stencil smaller than derivative order");
    std::vector<std::vector<double>> c(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(m) + 1, 0.0));
    double c1 = 1.0;
    double c4 = x[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        const int mn = std::min(i, m);
        double c2 = 1.0;
        const double c5 = c4;
        c4 = x[static_cast<std::size_t>(i)] - x0;
        for (int j = 0; j < i; ++j) {
            const double c3 = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] =
                        c1 * (k * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k - 1)] -
                              c5 * c[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)]) / c2;
                c[static_cast<std::size_t>(i)][0] = -c1 * c5 * c[static_cast<std::size_t>(i - 1)][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] =
                    (c4 * c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] -
                     k * c[static_cast<std::size_t>(j)][static_cast<std::size_t>(k - 1)]) / c3;
            c[static_cast<std::size_t>(j)][0] = c4 * c[static_cast<std::size_t>(j)][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)][static_cast<std::size_t>(m)];
    return w;
}

// Index window [first, first+width) of the 5-point stencil around node i:
// centered in the interior, one-sided at the ends.
inline std::size_t stencil_start(std::size_t i, std::size_t n, std::size_t width = 5) {
    if (n < width) throw InsufficientResolutionError("stencil_start: grid smaller than stencil");
    if (i < width / 2) return 0;
    if (i + width / 2 >= n) return n - width;
    return i - width / 2;
}

} // namespace normext
