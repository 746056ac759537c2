#include "ordermc/model_io.hpp"

#include "ordermc/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>
#include <utility>

namespace ordermc::systems {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
    throw config_error(origin + ": " + what);
}

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                         const std::string& origin, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            fail(origin, "unknown key '" + it.key() + "' in " + where);
    }
}

double require_number(const json& v, const std::string& origin, const std::string& where) {
    if (!v.is_number()) fail(origin, where + " must be a number");
    return v.get<double>();
}

engine::ParameterSpace parse_space(const json& ps, const std::string& origin) {
    if (!ps.is_object()) fail(origin, "parameter_space must be an object");
    reject_unknown_keys(ps, {"bounds", "laws"}, origin, "parameter_space");
    if (!ps.contains("bounds") || !ps["bounds"].is_array() || ps["bounds"].empty())
        fail(origin, "parameter_space.bounds must be a non-empty array of [lo,hi] pairs");

    std::vector<engine::Interval> bounds;
    for (const auto& b : ps["bounds"]) {
        if (!b.is_array() || b.size() != 2) fail(origin, "each bound must be a [lo,hi] pair");
        bounds.push_back({require_number(b[0], origin, "bound lo"), require_number(b[1], origin, "bound hi")});
    }

    std::vector<engine::CoordinateLaw> laws(bounds.size());
    if (ps.contains("laws")) {
        const auto& ls = ps["laws"];
        if (!ls.is_array() || ls.size() != bounds.size())
            fail(origin, "parameter_space.laws must list one law per coordinate");
        for (std::size_t i = 0; i < ls.size(); ++i) {
            const auto& l = ls[i];
            if (l.is_string()) {
                if (l.get<std::string>() != "uniform") fail(origin, "unknown law '" + l.get<std::string>() + "'");
                laws[i] = engine::Uniform{};
            } else if (l.is_object()) {
                reject_unknown_keys(l, {"type", "mean", "stddev"}, origin, "law");
                if (!l.contains("type") || l["type"] != "truncated-normal")
                    fail(origin, "law objects must have type 'truncated-normal'");
                if (!l.contains("mean") || !l.contains("stddev"))
                    fail(origin, "truncated-normal law needs mean and stddev");
                laws[i] = engine::TruncatedNormal{require_number(l["mean"], origin, "mean"),
                                                  require_number(l["stddev"], origin, "stddev")};
            } else {
                fail(origin, "law must be a string or an object");
            }
        }
    }
    try {
        return engine::ParameterSpace(std::move(bounds), std::move(laws));
    } catch (const std::domain_error& e) {
        fail(origin, e.what());
    }
}

AffineMatrix parse_affine(const json& m, int param_dim, const std::string& origin,
                          const std::string& name) {
    if (!m.is_array() || m.empty()) fail(origin, "matrix " + name + " must be a non-empty array of rows");
    const int rows = static_cast<int>(m.size());
    const int cols = static_cast<int>(m[0].size());
    if (cols == 0) fail(origin, "matrix " + name + " has an empty row");

    linalg::Matrix base(rows, cols);
    std::vector<linalg::Matrix> coeffs(static_cast<std::size_t>(param_dim),
                                       linalg::Matrix(rows, cols));
    for (int i = 0; i < rows; ++i) {
        const auto& row = m[i];
        if (!row.is_array() || static_cast<int>(row.size()) != cols)
            fail(origin, "matrix " + name + " rows have inconsistent lengths");
        for (int j = 0; j < cols; ++j) {
            const auto& entry = row[j];
            if (entry.is_number()) {
                base(i, j) = entry.get<double>();
                continue;
            }
            if (!entry.is_array() || entry.empty())
                fail(origin, "matrix " + name + " entries must be numbers or coefficient lists");
            if (static_cast<int>(entry.size()) > param_dim + 1)
                fail(origin, "matrix " + name + " entry lists more coefficients than parameters");
            base(i, j) = require_number(entry[0], origin, "entry constant");
            for (std::size_t p = 1; p < entry.size(); ++p)
                coeffs[p - 1](i, j) = require_number(entry[p], origin, "entry coefficient");
        }
    }
    return AffineMatrix(std::move(base), std::move(coeffs));
}

} // namespace

std::string to_string(Formulation f) {
    switch (f) {
        case Formulation::robust_stability: return "robust-stability";
        case Formulation::margin: return "margin";
        case Formulation::performance_range: return "performance-range";
        case Formulation::synthesis: return "synthesis";
    }
    return "?";
}

ModelSpec parse_model(const std::string& json_text, const std::string& origin) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        fail(origin, std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) fail(origin, "top level must be an object");
    reject_unknown_keys(root, {"formulation", "parameter_space", "matrices", "alpha", "gamma0", "name"},
                        origin, "model");
    for (const char* key : {"formulation", "parameter_space", "matrices"}) {
        if (!root.contains(key)) fail(origin, std::string("missing required key '") + key + "'");
    }

    Formulation formulation;
    const std::string f = root["formulation"].is_string() ? root["formulation"].get<std::string>() : "";
    if (f == "robust-stability") formulation = Formulation::robust_stability;
    else if (f == "margin") formulation = Formulation::margin;
    else if (f == "performance-range") formulation = Formulation::performance_range;
    else if (f == "synthesis") formulation = Formulation::synthesis;
    else fail(origin, "formulation must be one of robust-stability | margin | performance-range | synthesis");

    engine::ParameterSpace space = parse_space(root["parameter_space"], origin);
    const int pd = space.dimension();

    const auto& mats = root["matrices"];
    if (!mats.is_object()) fail(origin, "matrices must be an object");
    reject_unknown_keys(mats, {"A", "B", "C", "D"}, origin, "matrices");
    if (!mats.contains("A")) fail(origin, "matrices.A is required");
    AffineMatrix a = parse_affine(mats["A"], pd, origin, "A");
    const int n = a.rows();

    auto block_or_zero = [&](const char* name, int r, int c) {
        if (mats.contains(name)) return parse_affine(mats[name], pd, origin, name);
        return AffineMatrix::constant(linalg::Matrix(r, c), pd);
    };
    AffineMatrix b = block_or_zero("B", n, 1);
    AffineMatrix c = block_or_zero("C", 1, n);
    AffineMatrix d = block_or_zero("D", c.rows(), b.cols());

    std::optional<double> alpha;
    std::optional<double> gamma0;
    if (root.contains("alpha")) alpha = require_number(root["alpha"], origin, "alpha");
    if (root.contains("gamma0")) gamma0 = require_number(root["gamma0"], origin, "gamma0");
    std::string name = root.contains("name") && root["name"].is_string()
                           ? root["name"].get<std::string>()
                           : origin;

    if (formulation == Formulation::synthesis && !alpha)
        fail(origin, "synthesis models need 'alpha'");
    if (formulation == Formulation::margin && !gamma0)
        fail(origin, "margin models need 'gamma0'");

    try {
        StateSpaceModel model(std::move(a), std::move(b), std::move(c), std::move(d));
        return ModelSpec{formulation, std::move(space), std::move(model), alpha, gamma0, std::move(name)};
    } catch (const std::domain_error& e) {
        fail(origin, e.what());
    }
}

ModelSpec load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open model file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_model(buf.str(), path);
}

namespace {

// Single-state closed loop xdot = (1-k) x + d, y = x; admissible gains
// must push the pole left of -alpha, and the transfer 1/(s-1+k) has
// H-infinity norm 1/(k-1) there. The optimum over [0,10] sits at k = 10.
constexpr const char* kSynthesisModel = R"({
  "name": "builtin-synthesis",
  "formulation": "synthesis",
  "parameter_space": {"bounds": [[0.0, 10.0]]},
  "matrices": {
    "A": [[[1.0, -1.0]]],
    "B": [[1.0]],
    "C": [[1.0]],
    "D": [[0.0]]
  },
  "alpha": 0.5
})";

// Unity feedback around 1/(s-1) with gain q: pole 1-q, unstable iff
// q <= 1, so the destabilizing-perturbation minimum is 0.
constexpr const char* kMarginModel = R"({
  "name": "builtin-margin",
  "formulation": "margin",
  "parameter_space": {"bounds": [[0.0, 3.0]]},
  "matrices": {
    "A": [[[1.0, -1.0]]],
    "B": [[1.0]],
    "C": [[1.0]],
    "D": [[0.0]]
  },
  "gamma0": 3.0
})";

// Loop that no admissible gain can destabilize: pole -1-q. The
// constrained subset is empty and indirect sampling hits its draw cap.
constexpr const char* kMarginEmptyModel = R"({
  "name": "builtin-margin-empty",
  "formulation": "margin",
  "parameter_space": {"bounds": [[0.0, 3.0]]},
  "matrices": {
    "A": [[[-1.0, -1.0]]],
    "B": [[1.0]],
    "C": [[1.0]],
    "D": [[0.0]]
  },
  "gamma0": 3.0
})";

// Second-order plant 1/(s^2 + q s + 1) with uncertain damping q in
// [0.2, 2]: stable everywhere, H-infinity norm ranging from 1 (q >=
// sqrt(2)) up to 1/(q sqrt(1-q^2/4)) at q = 0.2.
constexpr const char* kPerformanceModel = R"({
  "name": "builtin-performance",
  "formulation": "performance-range",
  "parameter_space": {"bounds": [[0.2, 2.0]]},
  "matrices": {
    "A": [[0.0, 1.0], [-1.0, [0.0, -1.0]]],
    "B": [[0.0], [1.0]],
    "C": [[1.0, 0.0]],
    "D": [[0.0]]
  }
})";

// Upper-triangular A with two uncertain diagonal entries; the spectral
// abscissa max(-1+q1, -2+q2) stays below -0.5 over the box.
constexpr const char* kStabilityModel = R"({
  "name": "builtin-stability",
  "formulation": "robust-stability",
  "parameter_space": {"bounds": [[-0.5, 0.5], [-0.5, 0.5]]},
  "matrices": {
    "A": [[[-1.0, 1.0, 0.0], 2.0], [0.0, [-2.0, 0.0, 1.0]]],
    "B": [[0.0], [1.0]],
    "C": [[1.0, 0.0]],
    "D": [[0.0]]
  }
})";

} // namespace

ModelSpec bundled_model(const std::string& name) {
    if (name == "synthesis") return parse_model(kSynthesisModel, "builtin:synthesis");
    if (name == "margin") return parse_model(kMarginModel, "builtin:margin");
    if (name == "margin-empty") return parse_model(kMarginEmptyModel, "builtin:margin-empty");
    if (name == "performance") return parse_model(kPerformanceModel, "builtin:performance");
    if (name == "stability") return parse_model(kStabilityModel, "builtin:stability");
    throw config_error("unknown builtin model '" + name + "'");
}

std::vector<std::string> bundled_model_names() {
    return {"synthesis", "margin", "margin-empty", "performance", "stability"};
}

engine::ConstrainedProblem to_problem(const ModelSpec& spec, const HinfOptions& hinf) {
    switch (spec.formulation) {
        case Formulation::robust_stability:
            return robust_stability_problem(spec.model, spec.space);
        case Formulation::performance_range:
            return performance_range_problem(spec.model, spec.space, hinf);
        case Formulation::synthesis: {
            SynthesisProblem p{spec.model, spec.space, *spec.alpha};
            return synthesis_problem(p, hinf);
        }
        case Formulation::margin:
            return stability_margin_problem(spec.model, *spec.gamma0);
    }
    throw config_error("to_problem: unhandled formulation");
}

} // namespace ordermc::systems
