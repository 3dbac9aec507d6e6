#pragma once

//
// config.hpp — JSON problem configurations for the CLI and batch runs.
//
// Schema "normext/1". Complex numbers are [re, im] pairs; dense matrices are
// arrays of rows; polynomial entries are coefficient lists in ascending
// powers of t. See tools/configs/ for worked files.
//

#include <fstream>
#include <json.hpp>

#include "normext/extensions.hpp"

namespace normext {

using json = nlohmann::ordered_json;

struct NumericsConfig {
    int grid_n = 1024;           // oracle grid size N
    double evolution_step = 1e-3;
    int k_min = -7;
    int k_max = 7;
    int snumber_count = 1000;
    double match_tolerance = 0.05;   // bound on the relative pairing distance
    double im_trust_factor = 0.2;    // trusted band |Im| <= factor * N
    int residual_grid_n = 257;
    double normality_tolerance = 1e-6;
    std::size_t fit_from = 0; // 0 = defaults
    std::size_t fit_to = 0;
    std::vector<double> schatten_p{1.0, 2.0};
};

struct ProblemConfig {
    int dim;
    WeightFunction weight;
    MatrixXcd c_matrix;
    MatrixXcd w_matrix;
    CoefficientPath::MatrixFn a_i; // null means identically zero
    std::string a_i_kind;
    NumericsConfig numerics;
    double perturb_eps = 0.0;
    std::uint64_t seed = 0;
};

namespace cfg_detail {

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

inline const json& field(const json& j, const std::string& key, const std::string& path) {
    auto it = j.find(key);
    if (it == j.end()) fail(path + "." + key, "missing field");
    return *it;
}

inline double number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

inline complexd parse_complex(const json& j, const std::string& path) {
    if (j.is_number()) return complexd(j.get<double>(), 0.0);
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return complexd(j[0].get<double>(), j[1].get<double>());
    fail(path, "expected a number or an [re, im] pair");
}

inline MatrixXcd parse_dense(const json& j, int dim, const std::string& path) {
    if (!j.is_array() || static_cast<int>(j.size()) != dim) fail(path, "expected " + std::to_string(dim) + " rows");
    MatrixXcd m(dim, dim);
    for (int r = 0; r < dim; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != dim)
            fail(path, "row " + std::to_string(r) + " must have " + std::to_string(dim) + " entries");
        for (int c = 0; c < dim; ++c)
            m(r, c) = parse_complex(row[static_cast<std::size_t>(c)],
                                    path + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
    return m;
}

inline WeightFunction parse_weight(const json& j, const std::string& path) {
    const std::string kind = field(j, "kind", path).get<std::string>();
    if (kind == "constant")
        return WeightFunction::constant(j.contains("value") ? number(j["value"], path + ".value") : 1.0);
    if (kind == "power") return WeightFunction::power(number(field(j, "gamma", path), path + ".gamma"));
    if (kind == "reflected_power")
        return WeightFunction::reflected_power(number(field(j, "delta", path), path + ".delta"));
    if (kind == "sine") return WeightFunction::sine(number(field(j, "gamma", path), path + ".gamma"));
    if (kind == "tabulated") {
        if (j.contains("csv")) return WeightFunction::tabulated_csv(j["csv"].get<std::string>());
        const json& ts = field(j, "t", path);
        const json& as = field(j, "alpha", path);
        return WeightFunction::tabulated(ts.get<std::vector<double>>(), as.get<std::vector<double>>());
    }
    fail(path + ".kind", "unknown weight kind '" + kind + "'");
}

inline MatrixXcd parse_constant_matrix(const json& j, int dim, const std::string& path) {
    if (j.contains("diag")) {
        const auto diag = j["diag"].get<std::vector<double>>();
        if (static_cast<int>(diag.size()) != dim) fail(path + ".diag", "needs dim entries");
        MatrixXcd m = MatrixXcd::Zero(dim, dim);
        for (int i = 0; i < dim; ++i) m(i, i) = diag[static_cast<std::size_t>(i)];
        return m;
    }
    if (j.contains("dense")) return parse_dense(j["dense"], dim, path + ".dense");
    fail(path, "expected 'diag' or 'dense'");
}

inline MatrixXcd parse_unitary(const json& j, int dim, const std::string& path) {
    if (j.contains("diag_phases")) {
        const auto ph = j["diag_phases"].get<std::vector<double>>();
        if (static_cast<int>(ph.size()) != dim) fail(path + ".diag_phases", "needs dim entries");
        MatrixXcd m = MatrixXcd::Zero(dim, dim);
        for (int i = 0; i < dim; ++i) m(i, i) = std::polar(1.0, ph[static_cast<std::size_t>(i)]);
        return m;
    }
    if (j.contains("dense")) return parse_dense(j["dense"], dim, path + ".dense");
    fail(path, "expected 'diag_phases' or 'dense'");
}

// polynomial matrix entries, ascending powers of t
inline CoefficientPath::MatrixFn parse_polynomial(const json& j, int dim, const std::string& path) {
    std::vector<std::vector<std::vector<complexd>>> coeffs(static_cast<std::size_t>(dim));
    if (!j.is_array() || static_cast<int>(j.size()) != dim) fail(path, "expected dim rows of entries");
    for (int r = 0; r < dim; ++r) {
        const json& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != dim) fail(path, "bad row size");
        coeffs[static_cast<std::size_t>(r)].resize(static_cast<std::size_t>(dim));
        for (int c = 0; c < dim; ++c) {
            const json& entry = row[static_cast<std::size_t>(c)];
            if (!entry.is_array()) fail(path, "entry must be a coefficient list");
            for (std::size_t p = 0; p < entry.size(); ++p)
                coeffs[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].push_back(
                    parse_complex(entry[p], path + " coeff"));
        }
    }
    return [coeffs, dim](double t) {
        MatrixXcd m(dim, dim);
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) {
                complexd acc = 0.0;
                const auto& list = coeffs[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
                for (std::size_t p = list.size(); p-- > 0;) acc = acc * t + list[p];
                m(r, c) = acc;
            }
        return m;
    };
}

} // namespace cfg_detail

inline ProblemConfig parse_problem_config(const json& j) {
    using namespace cfg_detail;
    if (!j.contains("schema") || j["schema"].get<std::string>() != "normext/1")
        fail("schema", "expected \"normext/1\"");
    const int dim = field(j, "dim", "").get<int>();
    if (dim < 1) fail("dim", "must be >= 1");

    WeightFunction weight = parse_weight(field(j, "weight", ""), "weight");
    MatrixXcd c = parse_constant_matrix(field(j, "C", ""), dim, "C");
    MatrixXcd w = parse_unitary(field(j, "W", ""), dim, "W");

    CoefficientPath::MatrixFn a_i = nullptr;
    std::string a_i_kind = "zero";
    if (j.contains("a_i")) {
        const json& ja = j["a_i"];
        a_i_kind = field(ja, "kind", "a_i").get<std::string>();
        if (a_i_kind == "zero") {
            a_i = nullptr;
        } else if (a_i_kind == "constant") {
            const MatrixXcd m = parse_dense(field(ja, "matrix", "a_i"), dim, "a_i.matrix");
            a_i = [m](double) { return m; };
        } else if (a_i_kind == "polynomial") {
            a_i = parse_polynomial(field(ja, "entries", "a_i"), dim, "a_i.entries");
        } else {
            fail("a_i.kind", "unknown kind '" + a_i_kind + "'");
        }
    }

    NumericsConfig num;
    if (j.contains("numerics")) {
        const json& jn = j["numerics"];
        auto get_int = [&](const char* key, int dflt) {
            return jn.contains(key) ? jn[key].get<int>() : dflt;
        };
        auto get_double = [&](const char* key, double dflt) {
            return jn.contains(key) ? jn[key].get<double>() : dflt;
        };
        num.grid_n = get_int("grid_n", num.grid_n);
        num.evolution_step = get_double("evolution_step", num.evolution_step);
        num.k_min = get_int("k_min", num.k_min);
        num.k_max = get_int("k_max", num.k_max);
        num.snumber_count = get_int("snumber_count", num.snumber_count);
        num.match_tolerance = get_double("match_tolerance", num.match_tolerance);
        num.im_trust_factor = get_double("im_trust_factor", num.im_trust_factor);
        num.residual_grid_n = get_int("residual_grid_n", num.residual_grid_n);
        num.normality_tolerance = get_double("normality_tolerance", num.normality_tolerance);
        num.fit_from = static_cast<std::size_t>(get_int("fit_from", 0));
        num.fit_to = static_cast<std::size_t>(get_int("fit_to", 0));
        if (jn.contains("schatten_p")) num.schatten_p = jn["schatten_p"].get<std::vector<double>>();
    }

    ProblemConfig cfg{dim,  std::move(weight), std::move(c), std::move(w), std::move(a_i),
                      a_i_kind, num,           0.0,          0};
    if (j.contains("perturb_eps")) cfg.perturb_eps = j["perturb_eps"].get<double>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    return cfg;
}

inline ProblemConfig load_problem_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("json parse error in ") + path + ": " + e.what());
    }
    return parse_problem_config(j);
}

inline NormalExtension make_extension(const ProblemConfig& cfg) {
    return NormalExtension(cfg.weight, ConstantOperator(cfg.c_matrix), cfg.a_i, cfg.w_matrix,
                           cfg.numerics.evolution_step);
}

// coefficient family the config describes: A_r = (alpha'/2alpha)I + C
// (plus the optional linear drift used by negative controls), A_i from config
inline CoefficientPath make_coefficient_path(const ProblemConfig& cfg) {
    const int d = cfg.dim;
    const double eps = cfg.perturb_eps;
    const WeightFunction w = cfg.weight;
    const MatrixXcd c = cfg.c_matrix;
    CoefficientPath::MatrixFn ar = [w, c, d, eps](double t) -> MatrixXcd {
        return (0.5 * w.log_derivative(t) + eps * t) * MatrixXcd::Identity(d, d) + c;
    };
    CoefficientPath::MatrixFn ai = cfg.a_i;
    if (!ai) ai = [d](double) { return MatrixXcd::Zero(d, d); };
    std::vector<double> probe;
    for (int i = 0; i <= 32; ++i) {
        const double t = 0.05 + 0.9 * i / 32.0;
        if (w.distance_to_zero_set(t) > 1e-3) probe.push_back(t);
    }
    return CoefficientPath(d, CoeffRepresentation::Tabulated, std::move(ar), std::move(ai), probe);
}

inline json matrix_to_json(const MatrixXcd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c)
            row.push_back(json::array({m(r, c).real(), m(r, c).imag()}));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json weight_to_json(const WeightFunction& w) {
    json j;
    switch (w.kind()) {
        case WeightKind::Constant: j["kind"] = "constant"; j["value"] = w.param(); break;
        case WeightKind::Power: j["kind"] = "power"; j["gamma"] = w.param(); break;
        case WeightKind::ReflectedPower: j["kind"] = "reflected_power"; j["delta"] = w.param(); break;
        case WeightKind::Sine: j["kind"] = "sine"; j["gamma"] = w.param(); break;
        case WeightKind::Tabulated: j["kind"] = "tabulated"; break;
    }
    return j;
}

} // namespace normext
