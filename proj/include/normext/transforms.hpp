#pragma once

//
// transforms.hpp — unitary multiplication maps between weighted spaces,
// (F u)(t) = sqrt(beta/alpha)(t) u(t) : L^2_beta -> L^2_alpha,
// the conjugated differential expression they induce, and the transfer of
// the formal-normality test between the two spaces.
//
// Everything is realized pointwise on quadrature grids: each claim checked
// here reduces to pointwise identities plus quadrature.
//

#include "normext/coefficients.hpp"

namespace normext {

class WeightTransform {
  public:
    // F : L^2_source -> L^2_target, multiplier sqrt(source/target)
    WeightTransform(WeightFunction source, WeightFunction target)
        : source_(std::move(source)), target_(std::move(target)) {}

    // the map from the unweighted space, multiplier 1/sqrt(target)
    static WeightTransform from_unweighted(WeightFunction target) {
        return WeightTransform(WeightFunction::constant(1.0), std::move(target));
    }

    const WeightFunction& source() const { return source_; }
    const WeightFunction& target() const { return target_; }

    WeightTransform inverse() const { return WeightTransform(target_, source_); }

    double multiplier(double t) const {
        check_node(t);
        return std::sqrt(source_(t) / target_(t));
    }

    GridFunction apply(const GridFunction& u) const {
        MatrixXcd vals = u.values;
        for (std::size_t q = 0; q < u.nodes.size(); ++q)
            vals.col(static_cast<Eigen::Index>(q)) *= multiplier(u.nodes[q]);
        return GridFunction(u.nodes, std::move(vals));
    }

  private:
    void check_node(double t) const {
        if (source_.distance_to_zero_set(t) < WeightFunction::tol_zero ||
            target_.distance_to_zero_set(t) < WeightFunction::tol_zero)
            throw SingularityError("transform evaluated on a weight zero");
    }

    WeightFunction source_;
    WeightFunction target_;
};

struct IsometryCheck {
    double relative_error; // | ||Fu||^2_target - ||u||^2_source | / ||u||^2_source
    double excluded_mass;  // quadrature mass dropped near the zero sets
    int excluded_nodes;
};

// Quadrature-level unitarity of the transform on a smooth function: the
// squared norms in the two spaces must agree. Nodes within tol_zero of
// either zero set are excluded; their mass is reported.
inline IsometryCheck isometry_check(const WeightTransform& tr,
                                    const std::function<VectorXcd(double)>& u,
                                    int base_panels = 64) {
    const auto& alpha = tr.target();
    const auto& beta = tr.source();
    auto near_zero = [&](double t) {
        return alpha.distance_to_zero_set(t) < WeightFunction::tol_zero ||
               beta.distance_to_zero_set(t) < WeightFunction::tol_zero;
    };

    IsometryCheck chk{0.0, 0.0, 0};
    double norm_source = 0.0, norm_target = 0.0;

    const auto gsource = QuadratureGrid::for_weight(beta, base_panels);
    for (std::size_t q = 0; q < gsource.size(); ++q) {
        const double t = gsource.nodes[q];
        const double term = gsource.weights[q] * beta(t) * u(t).squaredNorm();
        if (near_zero(t)) {
            chk.excluded_mass += std::abs(term);
            ++chk.excluded_nodes;
        } else {
            norm_source += term;
        }
    }

    const auto gtarget = QuadratureGrid::for_weight(alpha, base_panels);
    for (std::size_t q = 0; q < gtarget.size(); ++q) {
        const double t = gtarget.nodes[q];
        if (near_zero(t)) {
            ++chk.excluded_nodes;
            continue;
        }
        const double m = tr.multiplier(t);
        const double term = gtarget.weights[q] * alpha(t) * (m * m) * u(t).squaredNorm();
        norm_target += term;
    }

    if (!(norm_source > 0.0)) throw ParameterError("isometry_check: test function has zero norm");
    chk.relative_error = std::abs(norm_target - norm_source) / norm_source;
    return chk;
}

// Coefficient family of the conjugated expression in L^2_beta:
// real part beta'/(2 beta) I + C, imaginary part unchanged.
inline CoefficientPath conjugated_expression(const ConstantOperator& c,
                                             CoefficientPath::MatrixFn a_i,
                                             const WeightFunction& beta) {
    return CoefficientPath::normal_form(beta, c, std::move(a_i));
}

struct TransferCheck {
    double residual_alpha;
    double residual_beta;
};

// Builds the coefficient families induced by the same (C, A_i) in L^2_alpha
// and L^2_beta (optionally both perturbed by the same Hermitian term) and
// returns both formal-normality residuals. Conjugation preserves the defect,
// so the residuals vanish together or stay large together.
inline TransferCheck formal_normality_transfer_check(
    const ConstantOperator& c, CoefficientPath::MatrixFn a_i, const WeightFunction& alpha,
    const WeightFunction& beta, int grid_n = 257,
    CoefficientPath::MatrixFn perturbation = nullptr) {
    const int d = static_cast<int>(c.dim());
    auto make_path = [&](const WeightFunction& w) {
        CoefficientPath::MatrixFn ar = [w, cm = c.matrix(), d, perturbation](double t) -> MatrixXcd {
            MatrixXcd m = 0.5 * w.log_derivative(t) * MatrixXcd::Identity(d, d) + cm;
            if (perturbation) m += perturbation(t);
            return m;
        };
        CoefficientPath::MatrixFn ai = a_i;
        if (!ai) ai = [d](double) { return MatrixXcd::Zero(d, d); };
        std::vector<double> probe;
        for (int i = 0; i <= 32; ++i) {
            const double t = 0.05 + 0.9 * i / 32.0;
            if (w.distance_to_zero_set(t) > 1e-3) probe.push_back(t);
        }
        return CoefficientPath(d, CoeffRepresentation::Tabulated, std::move(ar), std::move(ai), probe);
    };

    TransferCheck out{};
    {
        auto path = make_path(alpha);
        const auto grid = residual_grid(alpha, grid_n);
        out.residual_alpha = normality_residual(path, alpha, grid);
    }
    {
        auto path = make_path(beta);
        const auto grid = residual_grid(beta, grid_n);
        out.residual_beta = normality_residual(path, beta, grid);
    }
    return out;
}

} // namespace normext
