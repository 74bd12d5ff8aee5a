#include "bathkit/serialize.hpp"

#include "bathkit/error.hpp"

#include <json.hpp>

#include <type_traits>

namespace bathkit::io {

using nlohmann::json;
using Eigen::Index;

namespace {

[[noreturn]] void fail(const std::string& pointer, const std::string& what) {
    throw InputError("at " + (pointer.empty() ? std::string("/") : pointer) + ": " + what);
}

json parse(std::string_view text) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw InputError(std::string("malformed JSON: ") + e.what());
    }
}

const json& field(const json& obj, const std::string& pointer, const char* key) {
    if (!obj.is_object()) fail(pointer, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(pointer + "/" + key, "missing required field");
    return *it;
}

double number(const json& v, const std::string& pointer) {
    if (!v.is_number()) fail(pointer, "expected a number");
    return v.get<double>();
}

double number_field(const json& obj, const std::string& pointer, const char* key) {
    return number(field(obj, pointer, key), pointer + "/" + key);
}

std::string string_field(const json& obj, const std::string& pointer, const char* key) {
    const auto& v = field(obj, pointer, key);
    if (!v.is_string()) fail(pointer + "/" + key, "expected a string");
    return v.get<std::string>();
}

const json& array_field(const json& obj, const std::string& pointer, const char* key) {
    const auto& v = field(obj, pointer, key);
    if (!v.is_array()) fail(pointer + "/" + key, "expected an array");
    return v;
}

template <class F>
auto rethrow_at(const std::string& pointer, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const InputError& e) {
        const std::string what = e.what();
        if (what.rfind("at /", 0) == 0) throw;
        fail(pointer, what);
    }
}

void check_schema(const json& j, std::string_view expected) {
    auto it = j.find("schema");
    if (it == j.end()) return;
    if (!it->is_string() || it->get<std::string>() != expected)
        fail("/schema", "expected \"" + std::string(expected) + "\"");
}

// ---------------------------- spectral density ------------------------------

json component_to_json(const SpectralComponent& c) {
    return std::visit(
        [](const auto& v) -> json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Debye>) {
                return {{"kind", "debye"}, {"lambda", v.lambda}, {"gamma", v.gamma}};
            } else if constexpr (std::is_same_v<T, OhmicExp>) {
                return {{"kind", "ohmic_exp"}, {"alpha", v.alpha}, {"omega_c", v.omega_c}};
            } else if constexpr (std::is_same_v<T, LorentzianSum>) {
                json peaks = json::array();
                for (const auto& p : v.peaks)
                    peaks.push_back({{"lambda", p.lambda}, {"gamma", p.gamma}, {"center", p.center}});
                return {{"kind", "lorentzian_sum"}, {"peaks", peaks}};
            } else {
                json points = json::array();
                for (const auto& p : v.points()) points.push_back({p.omega, p.value});
                return {{"kind", "tabulated"}, {"points", points}};
            }
        },
        c);
}

json sd_to_json(const SpectralDensity& sd) {
    if (sd.components().size() == 1) return component_to_json(sd.components().front());
    json comps = json::array();
    for (const auto& c : sd.components()) comps.push_back(component_to_json(c));
    return {{"kind", "sum"}, {"components", comps}};
}

void append_components(const json& j, const std::string& pointer, std::vector<SpectralComponent>& out) {
    const std::string kind = string_field(j, pointer, "kind");
    if (kind == "debye") {
        out.emplace_back(Debye{number_field(j, pointer, "lambda"), number_field(j, pointer, "gamma")});
    } else if (kind == "ohmic_exp") {
        out.emplace_back(OhmicExp{number_field(j, pointer, "alpha"), number_field(j, pointer, "omega_c")});
    } else if (kind == "lorentzian_sum") {
        const auto& peaks = array_field(j, pointer, "peaks");
        LorentzianSum sum;
        for (std::size_t i = 0; i < peaks.size(); ++i) {
            const std::string p = pointer + "/peaks/" + std::to_string(i);
            sum.peaks.push_back({number_field(peaks[i], p, "lambda"), number_field(peaks[i], p, "gamma"),
                                 number_field(peaks[i], p, "center")});
        }
        out.emplace_back(std::move(sum));
    } else if (kind == "tabulated") {
        const auto& pts = array_field(j, pointer, "points");
        std::vector<TabulatedPoint> points;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const std::string p = pointer + "/points/" + std::to_string(i);
            if (!pts[i].is_array() || pts[i].size() != 2) fail(p, "expected [omega, J]");
            points.push_back({number(pts[i][0], p + "/0"), number(pts[i][1], p + "/1")});
        }
        rethrow_at(pointer + "/points", [&] { out.emplace_back(Tabulated(std::move(points))); });
    } else if (kind == "sum") {
        const auto& comps = array_field(j, pointer, "components");
        for (std::size_t i = 0; i < comps.size(); ++i)
            append_components(comps[i], pointer + "/components/" + std::to_string(i), out);
    } else {
        fail(pointer + "/kind", "unknown spectral density kind '" + kind + "'");
    }
}

SpectralDensity sd_from_json(const json& j, const std::string& pointer) {
    std::vector<SpectralComponent> comps;
    append_components(j, pointer, comps);
    return rethrow_at(pointer, [&] { return SpectralDensity(std::move(comps)); });
}

// --------------------------------- bath -------------------------------------

json bath_body(const BathModel& bath) {
    json j;
    j["schema"] = bath_schema;
    if (bath.temperature.is_zero())
        j["temperature_K"] = "zero";
    else
        j["temperature_K"] = bath.temperature.in_kelvin();
    j["t_max_fs"] = bath.t_max();
    if (bath.grid) {
        j["omega_max_cm1"] = bath.grid->omega_max();
        j["n_time"] = bath.grid->n_time();
        j["n_freq"] = bath.grid->n_freq();
    }
    j["tol"] = bath.tol;
    if (bath.spectral_density) j["spectral_density"] = sd_to_json(*bath.spectral_density);
    json modes = json::array();
    for (const auto& m : bath.modes) modes.push_back({{"omega_cm1", m.omega_cm1}, {"z", m.z}, {"g_cm1", m.g_cm1}});
    j["modes"] = modes;
    const auto& d = bath.diagnostics;
    j["diagnostics"] = {
        {"id_rank", d.id_rank},
        {"mode_count", d.mode_count},
        {"id_error_estimate", d.id_error_estimate},
        {"nnls_residual", d.nnls_residual},
        {"nnls_iterations", d.nnls_iterations},
        {"nnls_converged", d.nnls_converged},
        {"max_abs_error", d.errors.max_abs_error},
        {"mean_abs_error", d.errors.mean_abs_error},
        {"rel_error", d.errors.rel_error},
    };
    return j;
}

BathModel bath_from(const json& j, const std::string& pointer) {
    if (!j.is_object()) fail(pointer, "expected an object");
    BathModel bath;
    const auto& temp = field(j, pointer, "temperature_K");
    if (temp.is_string()) {
        if (temp.get<std::string>() != "zero") fail(pointer + "/temperature_K", "expected a number or \"zero\"");
        bath.temperature = Temperature::zero();
    } else {
        const double kelvin = number(temp, pointer + "/temperature_K");
        bath.temperature = rethrow_at(pointer + "/temperature_K", [&] { return Temperature::kelvin(kelvin); });
    }
    if (j.contains("omega_max_cm1")) {
        const double t_max = number_field(j, pointer, "t_max_fs");
        const double omega_max = number_field(j, pointer, "omega_max_cm1");
        const auto n_time = static_cast<Index>(number_field(j, pointer, "n_time"));
        const auto n_freq = static_cast<Index>(number_field(j, pointer, "n_freq"));
        bath.grid = rethrow_at(pointer, [&] { return FdrGrid(t_max, omega_max, n_time, n_freq); });
    }
    if (j.contains("tol")) bath.tol = number_field(j, pointer, "tol");
    if (j.contains("spectral_density"))
        bath.spectral_density = sd_from_json(j.at("spectral_density"), pointer + "/spectral_density");

    const auto& modes = array_field(j, pointer, "modes");
    for (std::size_t i = 0; i < modes.size(); ++i) {
        const std::string p = pointer + "/modes/" + std::to_string(i);
        BathMode m{number_field(modes[i], p, "omega_cm1"), number_field(modes[i], p, "z"),
                   number_field(modes[i], p, "g_cm1")};
        if (m.g_cm1 < 0.0) fail(p + "/g_cm1", "coupling must be >= 0");
        if (m.z < 0.0) fail(p + "/z", "weight must be >= 0");
        bath.modes.push_back(m);
    }
    if (j.contains("diagnostics")) {
        const auto& d = j.at("diagnostics");
        const std::string p = pointer + "/diagnostics";
        if (!d.is_object()) fail(p, "expected an object");
        auto& out = bath.diagnostics;
        auto opt = [&](const char* key, auto& dst) {
            if (!d.contains(key)) return;
            using T = std::decay_t<decltype(dst)>;
            if constexpr (std::is_same_v<T, bool>) {
                if (!d.at(key).is_boolean()) fail(p + "/" + key, "expected a boolean");
                dst = d.at(key).get<bool>();
            } else {
                dst = static_cast<T>(number(d.at(key), p + "/" + key));
            }
        };
        opt("id_rank", out.id_rank);
        opt("mode_count", out.mode_count);
        opt("id_error_estimate", out.id_error_estimate);
        opt("nnls_residual", out.nnls_residual);
        opt("nnls_iterations", out.nnls_iterations);
        opt("nnls_converged", out.nnls_converged);
        opt("max_abs_error", out.errors.max_abs_error);
        opt("mean_abs_error", out.errors.mean_abs_error);
        opt("rel_error", out.errors.rel_error);
    } else {
        bath.diagnostics.mode_count = bath.mode_count();
    }
    return bath;
}

// -------------------------------- system ------------------------------------

json matrix_to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Index k = 0; k < m.cols(); ++k) row.push_back({m(i, k).real(), m(i, k).imag()});
        rows.push_back(row);
    }
    return rows;
}

ComplexMatrix matrix_from_json(const json& j, const std::string& pointer, Index dim) {
    if (!j.is_array() || static_cast<Index>(j.size()) != dim)
        fail(pointer, "expected " + std::to_string(dim) + " rows");
    ComplexMatrix m(dim, dim);
    for (Index i = 0; i < dim; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        const std::string rp = pointer + "/" + std::to_string(i);
        if (!row.is_array() || static_cast<Index>(row.size()) != dim)
            fail(rp, "expected " + std::to_string(dim) + " entries");
        for (Index k = 0; k < dim; ++k) {
            const auto& e = row[static_cast<std::size_t>(k)];
            const std::string ep = rp + "/" + std::to_string(k);
            if (e.is_number()) {
                m(i, k) = Complex(e.get<double>(), 0.0);
            } else if (e.is_array() && e.size() == 2) {
                m(i, k) = Complex(number(e[0], ep + "/0"), number(e[1], ep + "/1"));
            } else {
                fail(ep, "expected a number or [re, im]");
            }
        }
    }
    return m;
}

json system_body(const SystemSpec& s) {
    json couplings = json::array();
    for (const auto& c : s.couplings) couplings.push_back({{"bath", c.bath_label}, {"v_sb", matrix_to_json(c.v_sb)}});
    return {{"dim", s.dim()}, {"h_s", matrix_to_json(s.h_s)}, {"couplings", couplings}};
}

SystemSpec system_from(const json& j, const std::string& pointer) {
    if (!j.is_object()) fail(pointer, "expected an object");
    const double dim_value = number_field(j, pointer, "dim");
    const auto dim = static_cast<Index>(dim_value);
    if (dim < 1 || static_cast<double>(dim) != dim_value) fail(pointer + "/dim", "expected an integer >= 1");
    SystemSpec s;
    s.h_s = matrix_from_json(field(j, pointer, "h_s"), pointer + "/h_s", dim);
    if (auto loc = hermiticity_violation(s.h_s)) {
        fail(pointer + "/h_s/" + std::to_string(loc->row) + "/" + std::to_string(loc->col),
             "h_s is not Hermitian");
    }
    const auto& couplings = array_field(j, pointer, "couplings");
    for (std::size_t i = 0; i < couplings.size(); ++i) {
        const std::string p = pointer + "/couplings/" + std::to_string(i);
        SystemCoupling c;
        c.bath_label = string_field(couplings[i], p, "bath");
        c.v_sb = matrix_from_json(field(couplings[i], p, "v_sb"), p + "/v_sb", dim);
        if (auto loc = hermiticity_violation(c.v_sb)) {
            fail(p + "/v_sb/" + std::to_string(loc->row) + "/" + std::to_string(loc->col),
                 "v_sb is not Hermitian");
        }
        s.couplings.push_back(std::move(c));
    }
    rethrow_at(pointer, [&] { validate_system(s); });
    return s;
}

} // namespace

std::string spectral_density_to_json(const SpectralDensity& sd, int indent) {
    return sd_to_json(sd).dump(indent);
}

SpectralDensity spectral_density_from_json(std::string_view text) {
    return sd_from_json(parse(text), "");
}

std::string bath_to_json(const BathModel& bath, int indent) { return bath_body(bath).dump(indent); }

BathModel bath_from_json(std::string_view text) {
    const json j = parse(text);
    check_schema(j, bath_schema);
    return bath_from(j, "");
}

std::string system_to_json(const SystemSpec& system, int indent) { return system_body(system).dump(indent); }

SystemSpec system_from_json(std::string_view text) { return system_from(parse(text), ""); }

std::string model_to_json(const DiscreteModel& model, int indent) {
    json j;
    j["schema"] = model_schema;
    j["system"] = system_body(model.system());
    json baths = json::array();
    for (const auto& b : model.baths()) {
        json body = bath_body(b.bath);
        body.erase("schema");
        body["label"] = b.label;
        baths.push_back(std::move(body));
    }
    j["baths"] = baths;
    return j.dump(indent);
}

DiscreteModel model_from_json(std::string_view text) {
    const json j = parse(text);
    check_schema(j, model_schema);
    SystemSpec system = system_from(field(j, "", "system"), "/system");
    const auto& baths_json = array_field(j, "", "baths");
    std::vector<LabeledBath> baths;
    for (std::size_t i = 0; i < baths_json.size(); ++i) {
        const std::string p = "/baths/" + std::to_string(i);
        LabeledBath lb;
        lb.label = string_field(baths_json[i], p, "label");
        lb.bath = bath_from(baths_json[i], p);
        baths.push_back(std::move(lb));
    }
    return build_model(std::move(system), std::move(baths));
}

} // namespace bathkit::io
