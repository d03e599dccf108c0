#include "nullpulse/run_config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "nullpulse/errors.hpp"

namespace nullpulse {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& key, const std::string& why) {
    throw config_error(key + ": " + why);
}

void reject_unknown(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) bad(where + "." + it.key(), "unknown key");
    }
}

double get_num(const json& obj, const std::string& where, const char* key,
               double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) bad(where + "." + key, "expected a number");
    return v.get<double>();
}

int get_int(const json& obj, const std::string& where, const char* key,
            int fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) bad(where + "." + key, "expected an integer");
    return v.get<int>();
}

} // namespace

SystemCoupling make_preset_coupling(const std::string& preset, double scale,
                                    int n_fields) {
    std::vector<CouplingTerm> terms;
    if (preset == "zero") {
        // no terms
    } else if (preset == "q0") {
        for (int f = 0; f < n_fields; ++f)
            terms.push_back({f, QuadraticForm::metric_form(f, f) * scale});
    } else if (preset == "dt_squared") {
        for (int f = 0; f < n_fields; ++f)
            terms.push_back({f, QuadraticForm::time_squared(f, f) * scale});
    } else {
        bad("coupling.preset", "must be one of q0, dt_squared, zero");
    }
    return SystemCoupling(n_fields, std::move(terms));
}

RunConfig parse_run_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw config_error(std::string("not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw config_error("top level must be an object");
    reject_unknown(root, "config",
                   {"data", "grid", "coupling", "norms", "diagnostics", "output",
                    "study", "convergence", "compare"});

    RunConfig c;

    {
        if (!root.contains("data") || !root.at("data").is_object())
            bad("data", "required object");
        const json& d = root.at("data");
        reject_unknown(d, "data", {"delta", "amplitude", "profile", "n_fields"});
        double delta = get_num(d, "data", "delta", 0.05);
        double amplitude = get_num(d, "data", "amplitude", 1.0);
        int n_fields = get_int(d, "data", "n_fields", 1);
        if (!(delta > 0.0) || delta > 0.25)
            bad("data.delta", "pulse width must lie in (0, 0.25]");
        if (!(amplitude > 0.0) || !std::isfinite(amplitude))
            bad("data.amplitude", "must be a positive finite number");
        if (n_fields < 1 || n_fields > 8)
            bad("data.n_fields", "must lie in [1, 8]");
        PulseProfile profile;
        if (d.contains("profile")) {
            const json& p = d.at("profile");
            if (!p.is_object()) bad("data.profile", "expected an object");
            reject_unknown(p, "data.profile", {"kind", "params"});
            std::string kind = p.value("kind", std::string("polynomial_bump"));
            std::vector<double> params{10.0, 10.0};
            if (p.contains("params")) {
                if (!p.at("params").is_array()) bad("data.profile.params", "expected an array");
                params = p.at("params").get<std::vector<double>>();
            }
            try {
                profile = PulseProfile(kind, params);
            } catch (const std::exception& e) {
                bad("data.profile", e.what());
            }
        }
        c.data = ShortPulseData::make(delta, amplitude, profile, n_fields);
    }

    {
        const json g = root.value("grid", json::object());
        if (!g.is_object()) bad("grid", "expected an object");
        reject_unknown(g, "grid", {"ubar_max", "h_fine", "h_coarse", "u_cap"});
        c.ubar_max = get_num(g, "grid", "ubar_max", 40.0);
        c.h_fine = get_num(g, "grid", "h_fine", c.data.delta / 32.0);
        c.h_coarse = get_num(g, "grid", "h_coarse", 0.02);
        c.u_cap = get_num(g, "grid", "u_cap", -1.0);
        if (!(c.ubar_max > 1.0)) bad("grid.ubar_max", "must exceed 1");
        if (!(c.h_fine > 0.0)) bad("grid.h_fine", "must be positive");
        if (c.h_fine > c.data.delta / 8.0)
            bad("grid.h_fine", "must resolve the pulse, at most delta / 8");
        if (c.h_coarse < c.h_fine) bad("grid.h_coarse", "must be at least h_fine");
        if (c.u_cap > 0.0 && (c.u_cap < 1.0 || c.u_cap > c.ubar_max))
            bad("grid.u_cap", "truncation must lie in [1, ubar_max]");
    }

    {
        const json q = root.value("coupling", json::object());
        if (!q.is_object()) bad("coupling", "expected an object");
        reject_unknown(q, "coupling", {"preset", "scale", "terms"});
        c.coupling_scale = get_num(q, "coupling", "scale", 1.0);
        if (!std::isfinite(c.coupling_scale)) bad("coupling.scale", "must be finite");
        if (q.contains("terms")) {
            if (q.contains("preset")) bad("coupling", "give either preset or terms");
            if (!q.at("terms").is_array()) bad("coupling.terms", "expected an array");
            std::vector<CouplingTerm> terms;
            int idx = 0;
            for (const json& t : q.at("terms")) {
                std::string where = "coupling.terms[" + std::to_string(idx++) + "]";
                if (!t.is_object()) bad(where, "expected an object");
                reject_unknown(t, where, {"target", "j", "k", "matrix"});
                CouplingTerm term;
                term.target = get_int(t, where, "target", 0);
                term.form.field_j = get_int(t, where, "j", 0);
                term.form.field_k = get_int(t, where, "k", 0);
                auto in_range = [&](int f) { return f >= 0 && f < c.data.n_fields; };
                if (!in_range(term.target)) bad(where + ".target", "field index out of range");
                if (!in_range(term.form.field_j)) bad(where + ".j", "field index out of range");
                if (!in_range(term.form.field_k)) bad(where + ".k", "field index out of range");
                if (!t.contains("matrix") || !t.at("matrix").is_array() ||
                    t.at("matrix").size() != 16)
                    bad(where + ".matrix", "expected 16 row-major entries");
                for (int e = 0; e < 16; ++e) {
                    const json& v = t.at("matrix").at(static_cast<std::size_t>(e));
                    if (!v.is_number()) bad(where + ".matrix", "entries must be numbers");
                    term.form.a[static_cast<std::size_t>(e)] =
                        v.get<double>() * c.coupling_scale;
                }
                terms.push_back(term);
            }
            c.coupling_preset = "custom";
            try {
                c.coupling = SystemCoupling(c.data.n_fields, std::move(terms));
            } catch (const std::exception& e) {
                bad("coupling.terms", e.what());
            }
        } else {
            c.coupling_preset = q.value("preset", std::string("q0"));
            c.coupling = make_preset_coupling(c.coupling_preset, c.coupling_scale,
                                              c.data.n_fields);
        }
    }

    {
        const json n = root.value("norms", json::object());
        if (!n.is_object()) bad("norms", "expected an object");
        reject_unknown(n, "norms", {"alpha", "max_order"});
        c.alpha = get_num(n, "norms", "alpha", 0.9);
        c.max_order = get_int(n, "norms", "max_order", 2);
        if (!(c.alpha > 0.5) || !(c.alpha < 1.0))
            bad("norms.alpha", "must lie strictly between 0.5 and 1");
        if (c.max_order < 0 || c.max_order > 2)
            bad("norms.max_order", "must lie in [0, 2]");
    }

    {
        const json d = root.value("diagnostics", json::object());
        if (!d.is_object()) bad("diagnostics", "expected an object");
        reject_unknown(d, "diagnostics", {"decay_t_lo", "decay_t_hi", "identity_ubar"});
        c.decay_t_lo = get_num(d, "diagnostics", "decay_t_lo", 5.0);
        c.decay_t_hi = get_num(d, "diagnostics", "decay_t_hi",
                               std::min(40.0, c.ubar_max));
        c.identity_ubar = get_num(d, "diagnostics", "identity_ubar",
                                  std::min(8.0, c.ubar_max));
        if (!(c.decay_t_lo > 1.0)) bad("diagnostics.decay_t_lo", "must exceed 1");
        if (!(c.decay_t_hi > c.decay_t_lo))
            bad("diagnostics.decay_t_hi", "window must be nonempty");
        if (!(c.identity_ubar > 1.0) || c.identity_ubar > c.ubar_max)
            bad("diagnostics.identity_ubar", "must lie in (1, ubar_max]");
    }

    {
        const json o = root.value("output", json::object());
        if (!o.is_object()) bad("output", "expected an object");
        reject_unknown(o, "output", {"checkpoint_every"});
        c.checkpoint_every = get_int(o, "output", "checkpoint_every", 0);
        if (c.checkpoint_every < 0) bad("output.checkpoint_every", "must be >= 0");
    }

    {
        const json s = root.value("study", json::object());
        if (!s.is_object()) bad("study", "expected an object");
        reject_unknown(s, "study", {"deltas", "h_over_delta"});
        if (s.contains("deltas")) {
            if (!s.at("deltas").is_array()) bad("study.deltas", "expected an array");
            c.study.deltas = s.at("deltas").get<std::vector<double>>();
        }
        c.study.h_over_delta = get_int(s, "study", "h_over_delta", 32);
        if (c.study.deltas.size() < 3)
            bad("study.deltas", "scan needs at least 3 widths");
        for (std::size_t k = 0; k < c.study.deltas.size(); ++k) {
            double dd = c.study.deltas[k];
            if (!(dd > 0.0) || dd > 0.25)
                bad("study.deltas", "every width must lie in (0, 0.25]");
            if (k > 0 && !(dd < c.study.deltas[k - 1]))
                bad("study.deltas", "widths must decrease strictly");
        }
        if (c.study.h_over_delta < 8 || c.study.h_over_delta > 512)
            bad("study.h_over_delta", "must lie in [8, 512]");
    }

    {
        const json v = root.value("convergence", json::object());
        if (!v.is_object()) bad("convergence", "expected an object");
        reject_unknown(v, "convergence", {"levels"});
        c.convergence.levels = get_int(v, "convergence", "levels", 3);
        if (c.convergence.levels < 2 || c.convergence.levels > 6)
            bad("convergence.levels", "must lie in [2, 6]");
    }

    {
        const json p = root.value("compare", json::object());
        if (!p.is_object()) bad("compare", "expected an object");
        reject_unknown(p, "compare", {"amplitudes"});
        if (p.contains("amplitudes")) {
            if (!p.at("amplitudes").is_array()) bad("compare.amplitudes", "expected an array");
            c.compare.amplitudes = p.at("amplitudes").get<std::vector<double>>();
        }
        if (c.compare.amplitudes.size() < 2)
            bad("compare.amplitudes", "ladder needs at least 2 amplitudes");
        for (std::size_t k = 0; k < c.compare.amplitudes.size(); ++k) {
            double a = c.compare.amplitudes[k];
            if (!(a > 0.0) || !std::isfinite(a))
                bad("compare.amplitudes", "amplitudes must be positive");
            if (k > 0 && !(a > c.compare.amplitudes[k - 1]))
                bad("compare.amplitudes", "amplitudes must increase strictly");
        }
    }

    return c;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

std::string canonical_json(const RunConfig& c) {
    json root;
    root["data"] = {{"delta", c.data.delta},
                    {"amplitude", c.data.amplitude},
                    {"profile",
                     {{"kind", c.data.profile.kind()},
                      {"params", {static_cast<double>(c.data.profile.p()),
                                  static_cast<double>(c.data.profile.q())}}}},
                    {"n_fields", c.data.n_fields}};
    root["grid"] = {{"ubar_max", c.ubar_max},
                    {"h_fine", c.h_fine},
                    {"h_coarse", c.h_coarse},
                    {"u_cap", c.u_cap}};
    if (c.coupling_preset == "custom") {
        json terms = json::array();
        for (const CouplingTerm& t : c.coupling.terms()) {
            json m = json::array();
            for (double e : t.form.a) m.push_back(e);
            terms.push_back({{"target", t.target},
                             {"j", t.form.field_j},
                             {"k", t.form.field_k},
                             {"matrix", m}});
        }
        root["coupling"] = {{"scale", 1.0}, {"terms", terms}};
    } else {
        root["coupling"] = {{"preset", c.coupling_preset},
                            {"scale", c.coupling_scale}};
    }
    root["norms"] = {{"alpha", c.alpha}, {"max_order", c.max_order}};
    root["diagnostics"] = {{"decay_t_lo", c.decay_t_lo},
                           {"decay_t_hi", c.decay_t_hi},
                           {"identity_ubar", c.identity_ubar}};
    root["output"] = {{"checkpoint_every", c.checkpoint_every}};
    root["study"] = {{"deltas", c.study.deltas},
                     {"h_over_delta", c.study.h_over_delta}};
    root["convergence"] = {{"levels", c.convergence.levels}};
    root["compare"] = {{"amplitudes", c.compare.amplitudes}};
    return root.dump(2) + "\n";
}

std::string config_fingerprint(const RunConfig& c) {
    std::string s = canonical_json(c);
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

} // namespace nullpulse
