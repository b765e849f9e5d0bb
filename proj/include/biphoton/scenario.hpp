#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "biphoton/objects.hpp"
#include "biphoton/states.hpp"

namespace biphoton {

using json = nlohmann::json;

/// Malformed scenario file. `path()` is a JSON pointer to the offending value.
class SchemaError : public Error {
public:
    SchemaError(std::string path, const std::string& message)
        : Error((path.empty() ? std::string("/") : path) + ": " + message), path_(std::move(path)) {}

    const std::string& path() const { return path_; }

private:
    std::string path_;
};

enum class Analysis { joint, marginal, bucket, loss_decomposition, mimic_holography, mimic_product };

inline const char* to_string(Analysis a) {
    switch (a) {
    case Analysis::joint: return "joint";
    case Analysis::marginal: return "marginal";
    case Analysis::bucket: return "bucket";
    case Analysis::loss_decomposition: return "loss_decomposition";
    case Analysis::mimic_holography: return "mimic_holography";
    case Analysis::mimic_product: return "mimic_product";
    }
    return "?";
}

inline const std::vector<Analysis>& all_analyses() {
    static const std::vector<Analysis> all{Analysis::joint,          Analysis::marginal,
                                           Analysis::bucket,         Analysis::loss_decomposition,
                                           Analysis::mimic_holography, Analysis::mimic_product};
    return all;
}

using AnyState = std::variant<BiphotonPureState, BiphotonDensityState>;

/// A fully loaded scenario: objects already dilated, state in the declared (unpadded) modes.
struct Scenario {
    ModeSpace modes;
    AnyState state;
    std::string state_type;
    std::optional<CVector> diagonal; ///< set for diagonal-entangled sources
    ObjectOperator object1;
    ObjectOperator object2;
    std::vector<Analysis> analyses;
    std::optional<std::size_t> spare_mode; ///< zero-based
};

// ---------------------------------------------------------------------------
// complex / matrix encoding: complex as [re, im], matrices row-major

inline json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

inline json vector_to_json(const CVector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        out.push_back(complex_to_json(v(i)));
    return out;
}

inline json matrix_to_json(const CMatrix& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(complex_to_json(m(i, j)));
        out.push_back(std::move(row));
    }
    return out;
}

inline json real_vector_to_json(const RVector& v) {
    json out = json::array();
    for (double x : v)
        out.push_back(x);
    return out;
}

inline json real_matrix_to_json(const RMatrix& m) {
    json out = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        out.push_back(std::move(row));
    }
    return out;
}

namespace detail {

inline const json& require(const json& j, const std::string& path, const char* key) {
    if (!j.is_object())
        throw SchemaError(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end())
        throw SchemaError(path + "/" + key, "missing required field");
    return *it;
}

inline double read_number(const json& j, const std::string& path) {
    if (!j.is_number())
        throw SchemaError(path, "expected a number");
    return j.get<double>();
}

inline std::size_t read_count(const json& j, const std::string& path) {
    if (!j.is_number_integer() || j.get<std::int64_t>() < 1)
        throw SchemaError(path, "expected a positive integer");
    return j.get<std::size_t>();
}

inline Complex read_complex(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2)
        throw SchemaError(path, "expected a complex number [re, im]");
    return {read_number(j[0], path + "/0"), read_number(j[1], path + "/1")};
}

inline CVector read_vector(const json& j, const std::string& path, std::size_t length) {
    if (!j.is_array())
        throw SchemaError(path, "expected an array of complex numbers");
    if (j.size() != length)
        throw SchemaError(path, "expected length " + std::to_string(length) + ", got " + std::to_string(j.size()));
    CVector v(static_cast<Eigen::Index>(length));
    for (std::size_t i = 0; i < length; ++i)
        v(static_cast<Eigen::Index>(i)) = read_complex(j[i], path + "/" + std::to_string(i));
    return v;
}

inline CMatrix read_matrix(const json& j, const std::string& path, std::size_t rows, std::size_t cols) {
    if (!j.is_array())
        throw SchemaError(path, "expected a row-major matrix (array of rows)");
    if (j.size() != rows)
        throw SchemaError(path, "expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
    CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows; ++i) {
        const std::string row_path = path + "/" + std::to_string(i);
        if (!j[i].is_array() || j[i].size() != cols)
            throw SchemaError(row_path, "expected a row of " + std::to_string(cols) + " complex numbers");
        for (std::size_t k = 0; k < cols; ++k)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) =
                read_complex(j[i][k], row_path + "/" + std::to_string(k));
    }
    return m;
}

inline std::uint64_t read_seed(const json& j, const std::string& path) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
        throw SchemaError(path, "expected a non-negative integer seed");
    return j.get<std::uint64_t>();
}

inline ObjectOperator read_object(const json& j, const std::string& path, std::size_t dim, Side side,
                                  std::uint64_t default_seed) {
    const std::string type = [&] {
        const json& t = require(j, path, "type");
        if (!t.is_string())
            throw SchemaError(path + "/type", "expected a string");
        return t.get<std::string>();
    }();
    if (type == "identity")
        return identity_object(dim, side);
    if (type == "unitary")
        return unitary_from_matrix(read_matrix(require(j, path, "matrix"), path + "/matrix", dim, dim), side);
    if (type == "lossy")
        return dilate_lossy(TransferSpec(read_matrix(require(j, path, "matrix"), path + "/matrix", dim, dim), side));
    if (type == "haar") {
        const std::uint64_t seed = j.contains("seed") ? read_seed(j["seed"], path + "/seed") : default_seed;
        return haar_random_unitary(dim, seed, side);
    }
    throw SchemaError(path + "/type", "unknown object type '" + type + "' (identity, unitary, lossy, haar)");
}

} // namespace detail

/// Builds a Scenario from its JSON form. Structural problems raise SchemaError; physically
/// invalid content (non-unitary "unitary" objects, unnormalized states, active transfer
/// matrices) raises PhysicsError.
inline Scenario parse_scenario(const json& root, std::uint64_t default_seed = 42) {
    using namespace detail;
    const json& jm = require(root, "", "modes");
    const std::size_t m = read_count(require(jm, "/modes", "m_unprimed"), "/modes/m_unprimed");
    const std::size_t mp = read_count(require(jm, "/modes", "m_primed"), "/modes/m_primed");
    const std::size_t n = jm.contains("window_unprimed") ? read_count(jm["window_unprimed"], "/modes/window_unprimed") : m;
    const std::size_t np = jm.contains("window_primed") ? read_count(jm["window_primed"], "/modes/window_primed") : mp;
    if (n > m)
        throw SchemaError("/modes/window_unprimed", "window exceeds the number of modes");
    if (np > mp)
        throw SchemaError("/modes/window_primed", "window exceeds the number of modes");
    const ModeSpace modes(m, mp, n, np);

    const json& js = require(root, "", "state");
    const json& jtype = require(js, "/state", "type");
    if (!jtype.is_string())
        throw SchemaError("/state/type", "expected a string");
    const std::string state_type = jtype.get<std::string>();

    std::optional<AnyState> state;
    std::optional<CVector> diagonal;
    if (state_type == "pure") {
        state = pure_from_amplitudes(modes, read_matrix(require(js, "/state", "amplitudes"), "/state/amplitudes", m, mp));
    } else if (state_type == "diagonal") {
        if (m != mp)
            throw SchemaError("/modes", "diagonal states need m_unprimed == m_primed");
        CVector phi = read_vector(require(js, "/state", "phi"), "/state/phi", m);
        auto pure = diagonal_entangled(modes, phi);
        diagonal = pure.amplitudes().diagonal();
        state = std::move(pure);
    } else if (state_type == "mixture") {
        const json& comps = require(js, "/state", "components");
        if (!comps.is_array() || comps.empty())
            throw SchemaError("/state/components", "expected a non-empty array");
        CMatrix rho = CMatrix::Zero(static_cast<Eigen::Index>(modes.dimension()),
                                    static_cast<Eigen::Index>(modes.dimension()));
        for (std::size_t k = 0; k < comps.size(); ++k) {
            const std::string p = "/state/components/" + std::to_string(k);
            const double w = read_number(require(comps[k], p, "weight"), p + "/weight");
            if (w < 0.0)
                throw PhysicsError(p + "/weight: negative mixture weight");
            const auto psi = pure_from_amplitudes(modes, read_matrix(require(comps[k], p, "amplitudes"), p + "/amplitudes", m, mp));
            const CVector v = psi.flattened();
            rho += w * v * v.adjoint();
        }
        state = BiphotonDensityState(modes, rho);
    } else if (state_type == "ensemble") {
        const json& jt = require(js, "/state", "terms");
        if (!jt.is_array() || jt.empty())
            throw SchemaError("/state/terms", "expected a non-empty array");
        std::vector<EnsembleTerm> terms;
        for (std::size_t k = 0; k < jt.size(); ++k) {
            const std::string p = "/state/terms/" + std::to_string(k);
            terms.push_back(EnsembleTerm{read_number(require(jt[k], p, "weight"), p + "/weight"),
                                         read_matrix(require(jt[k], p, "unprimed"), p + "/unprimed", m, m),
                                         read_matrix(require(jt[k], p, "primed"), p + "/primed", mp, mp)});
        }
        state = density_from_ensemble(ClassicalEnsemble(modes, std::move(terms)));
    } else {
        throw SchemaError("/state/type", "unknown state type '" + state_type + "' (pure, diagonal, mixture, ensemble)");
    }

    ObjectOperator h1 = read_object(require(root, "", "object1"), "/object1", m, Side::unprimed, default_seed);
    ObjectOperator h2 = read_object(require(root, "", "object2"), "/object2", mp, Side::primed, default_seed);

    std::vector<Analysis> analyses;
    if (root.contains("analyses")) {
        const json& ja = root["analyses"];
        if (!ja.is_array())
            throw SchemaError("/analyses", "expected an array of analysis names");
        for (std::size_t k = 0; k < ja.size(); ++k) {
            const std::string p = "/analyses/" + std::to_string(k);
            if (!ja[k].is_string())
                throw SchemaError(p, "expected a string");
            const std::string name = ja[k].get<std::string>();
            bool found = false;
            for (Analysis a : all_analyses())
                if (name == to_string(a)) {
                    analyses.push_back(a);
                    found = true;
                }
            if (!found)
                throw SchemaError(p, "unknown analysis '" + name + "'");
        }
    } else {
        analyses = {Analysis::joint, Analysis::marginal, Analysis::bucket, Analysis::loss_decomposition};
    }

    std::optional<std::size_t> spare;
    if (root.contains("spare_mode")) {
        const std::size_t s = read_count(root["spare_mode"], "/spare_mode");
        spare = s - 1;
    }

    return Scenario{modes, std::move(*state), state_type, std::move(diagonal), std::move(h1), std::move(h2),
                    std::move(analyses), spare};
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw SchemaError("", "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw SchemaError("", std::string("invalid JSON: ") + e.what());
    }
}

inline Scenario load_scenario(const std::string& path, std::uint64_t default_seed = 42) {
    return parse_scenario(read_json_file(path), default_seed);
}

inline json modes_to_json(const ModeSpace& modes) {
    return json{{"m_unprimed", modes.m_unprimed()},
                {"m_primed", modes.m_primed()},
                {"window_unprimed", modes.window_unprimed()},
                {"window_primed", modes.window_primed()}};
}

} // namespace biphoton
