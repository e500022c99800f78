#pragma once

#include <charconv>
#include <string>
#include <vector>

#include <json.hpp>

#include "srgeo/bracket_engine.hpp"
#include "srgeo/curve.hpp"
#include "srgeo/extremal.hpp"
#include "srgeo/frame.hpp"
#include "srgeo/nilpotentization.hpp"
#include "srgeo/shortener.hpp"
#include "srgeo/solver.hpp"

// JSON/CSV formats. Conventions: rationals are strings "p" or "p/q"; doubles
// are JSON numbers in shortest round-trip decimal form; keys are emitted in
// alphabetical order so outputs are byte-stable for identical inputs.

namespace srgeo {
namespace io {

using nlohmann::json;

// Shortest decimal that parses back to the same binary64; used for CSV.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// ---------- symbolic layer ----------

inline json polynomial_to_json(const Polynomial& p) {
    json terms = json::array();
    for (const auto& [e, c] : p.terms()) {
        json t;
        t["exp"] = e;
        t["coeff"] = format_rational(c);
        terms.push_back(std::move(t));
    }
    return json{{"terms", std::move(terms)}};
}

inline Polynomial polynomial_from_json(const json& j, int dimension) {
    if (!j.is_object() || !j.contains("terms") || !j["terms"].is_array())
        throw domain_error("polynomial JSON: expected an object with a 'terms' array");
    Polynomial p(dimension);
    for (const auto& t : j["terms"]) {
        if (!t.contains("exp") || !t.contains("coeff"))
            throw domain_error("polynomial JSON: each term needs 'exp' and 'coeff'");
        Exponents e = t["exp"].get<Exponents>();
        if (static_cast<int>(e.size()) != dimension)
            throw domain_error("polynomial JSON: exponent arity does not match the dimension");
        p.add_term(std::move(e), parse_rational(t["coeff"].get<std::string>()));
    }
    return p;
}

inline json vector_field_to_json(const VectorField& f) {
    json axes = json::array();
    for (int i = 0; i < f.dimension(); ++i) axes.push_back(polynomial_to_json(f.coeff(i)));
    return axes;
}

inline VectorField vector_field_from_json(const json& j) {
    if (!j.is_array() || j.empty())
        throw domain_error("vector field JSON: expected a nonempty array of polynomials");
    const int n = static_cast<int>(j.size());
    VectorField f(n);
    for (int i = 0; i < n; ++i) f.set_coeff(i, polynomial_from_json(j[static_cast<std::size_t>(i)], n));
    return f;
}

inline json frame_to_json(const Frame& frame) {
    json j;
    j["dimension"] = frame.dimension();
    json gens = json::array();
    for (const auto& g : frame.generators()) gens.push_back(vector_field_to_json(g));
    j["generators"] = std::move(gens);
    if (frame.metric().is_identity()) {
        j["metric"] = "identity";
    } else {
        json rows = json::array();
        for (const auto& row : frame.metric().matrix()) {
            json r = json::array();
            for (const auto& c : row) r.push_back(format_rational(c));
            rows.push_back(std::move(r));
        }
        j["metric"] = std::move(rows);
    }
    return j;
}

inline Frame frame_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dimension") || !j.contains("generators"))
        throw domain_error("frame JSON: expected 'dimension' and 'generators'");
    const int n = j["dimension"].get<int>();
    std::vector<VectorField> gens;
    for (const auto& g : j["generators"]) {
        VectorField f = vector_field_from_json(g);
        if (f.dimension() != n) throw domain_error("frame JSON: generator dimension mismatch");
        gens.push_back(std::move(f));
    }
    Metric metric = Metric::identity();
    if (j.contains("metric") && !(j["metric"].is_string() && j["metric"] == "identity")) {
        const auto& rows = j["metric"];
        if (!rows.is_array()) throw domain_error("frame JSON: metric must be 'identity' or a matrix");
        std::vector<std::vector<Rational>> m;
        for (const auto& row : rows) {
            std::vector<Rational> r;
            for (const auto& c : row) r.push_back(parse_rational(c.get<std::string>()));
            m.push_back(std::move(r));
        }
        metric = Metric::from_matrix(std::move(m));
    }
    return Frame(n, std::move(gens), std::move(metric));
}

inline json multiindex_to_json(const MultiIndex& beta) { return json(beta.entries); }

// ---------- curves ----------

inline json curve_to_json(const HorizontalCurve& c, bool with_states = true) {
    json j;
    j["base_point"] = c.base_point;
    j["times"] = c.times;
    j["controls"] = c.controls;
    if (with_states && c.has_states()) j["states"] = c.states;
    return j;
}

// Accepts the canonical piecewise-constant layout (N controls, N+1 times) and
// the piecewise-linear layout (N+1 nodal controls), which is resampled to
// interval midpoint values.
inline HorizontalCurve curve_from_json(const json& j) {
    if (!j.is_object() || !j.contains("base_point") || !j.contains("times") || !j.contains("controls"))
        throw domain_error("curve JSON: expected 'base_point', 'times' and 'controls'");
    HorizontalCurve c;
    c.base_point = j["base_point"].get<std::vector<double>>();
    c.times = j["times"].get<std::vector<double>>();
    c.controls = j["controls"].get<std::vector<std::vector<double>>>();
    if (c.controls.size() == c.times.size() && c.times.size() >= 2) {
        std::vector<std::vector<double>> cells;
        cells.reserve(c.times.size() - 1);
        for (std::size_t k = 0; k + 1 < c.controls.size(); ++k) {
            std::vector<double> mid(c.controls[k].size());
            for (std::size_t i = 0; i < mid.size(); ++i)
                mid[i] = 0.5 * (c.controls[k][i] + c.controls[k + 1][i]);
            cells.push_back(std::move(mid));
        }
        c.controls = std::move(cells);
    }
    if (j.contains("states")) c.states = j["states"].get<std::vector<std::vector<double>>>();
    c.validate();
    return c;
}

// ---------- reports ----------

inline json growth_report_to_json(const GrowthReport& rep) {
    json j;
    j["base_point"] = rep.base_point;
    j["layer_dims"] = rep.layer_dims;
    j["step"] = rep.step;
    j["weights"] = rep.weights;
    j["layer_bracket_condition"] = rep.layer_bracket_condition;
    j["growth_pause_condition"] = rep.growth_pause_condition;
    j["bracket_generating"] = rep.bracket_generating;
    j["exact"] = rep.exact;
    return j;
}

inline json adapted_basis_to_json(const AdaptedBasis& basis) {
    json j;
    json idx = json::array();
    for (const auto& beta : basis.indices) idx.push_back(multiindex_to_json(beta));
    j["indices"] = std::move(idx);
    j["weights"] = basis.weights;
    json fields = json::array();
    for (const auto& f : basis.fields) fields.push_back(vector_field_to_json(f));
    j["fields"] = std::move(fields);
    return j;
}

inline json graded_structure_to_json(const GradedStructure& gs) {
    json j;
    j["weights"] = gs.weights;
    j["homogeneous_dimension"] = gs.homogeneous_dimension;
    j["limit_frame"] = frame_to_json(gs.limit_frame);
    return j;
}

inline json solve_result_to_json(const SolveResult& res, std::uint64_t seed) {
    json j;
    j["length"] = res.length;
    j["endpoint_error"] = res.endpoint_error;
    j["endpoint_error_half"] = res.endpoint_error_half;
    j["restart_index"] = res.restart_index;
    j["stages"] = res.stages;
    j["seed"] = seed;
    j["curve"] = curve_to_json(res.curve);
    return j;
}

inline json certificate_to_json(const ShorteningCertificate& cert) {
    json j;
    j["dimension"] = cert.dimension;
    j["corner_length"] = cert.corner_length;
    j["competitor_length"] = cert.competitor_length;
    j["margin"] = cert.margin;
    j["endpoint_error"] = cert.endpoint_error;
    j["endpoint_error_half"] = cert.endpoint_error_half;
    j["eps"] = cert.eps;
    j["grid_index"] = cert.grid_index;
    j["k_values"] = cert.k_values;
    j["patch_cost"] = cert.patch_cost;
    j["h"] = cert.h;
    j["candidates"] = cert.candidates;
    j["competitor"] = curve_to_json(cert.competitor);
    return j;
}

inline json abnormal_report_to_json(const AbnormalResidualReport& rep) {
    json j;
    j["ode_residual"] = rep.ode;
    j["algebraic_residual"] = rep.algebraic;
    j["xi4_normalized"] = rep.xi4_normalized;
    j["xi_nonvanishing"] = rep.xi_nonvanishing;
    return j;
}

// ---------- CSV ----------

inline std::string history_to_csv(const std::vector<StageRecord>& history) {
    std::string out = "stage,mu,gap\n";
    for (const auto& rec : history) {
        out += std::to_string(rec.stage);
        out += ',';
        out += format_double(rec.mu);
        out += ',';
        out += format_double(rec.gap);
        out += '\n';
    }
    return out;
}

inline std::string fit_to_csv(const std::vector<double>& s_values,
                              const std::vector<double>& lengths) {
    if (s_values.size() != lengths.size())
        throw domain_error("fit_to_csv: value and length counts differ");
    std::string out = "s,length\n";
    for (std::size_t i = 0; i < s_values.size(); ++i) {
        out += format_double(s_values[i]);
        out += ',';
        out += format_double(lengths[i]);
        out += '\n';
    }
    return out;
}

}  // namespace io
}  // namespace srgeo
