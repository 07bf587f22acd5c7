#include "rqr/schedule.hpp"

#include <set>

#include "rqr/errors.hpp"
#include "rqr/units.hpp"

namespace rqr {

using nlohmann::json;
using namespace units;

double segment_duration(const ControlSegment& s) {
    return std::visit(
        [](const auto& x) -> double {
            using T = std::decay_t<decltype(x)>;
            if constexpr (std::is_same_v<T, Shift>) return x.ramp + x.hold;
            else if constexpr (std::is_same_v<T, VirtualPhase>) return 0.0;
            else return x.duration;
        },
        s);
}

std::string segment_kind(const ControlSegment& s) {
    static const char* names[] = {"shift", "resonant_a", "resonant_b", "rabi", "virtual_phase"};
    return names[s.index()];
}

double PulseSchedule::total_duration() const {
    double t = 0.0;
    for (const auto& s : segments) t += segment_duration(s);
    return t;
}

void PulseSchedule::validate() const {
    const HilbertSpace sp = params.space();
    const double slack = 1e-9 * params.omega_b;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const auto where = " in segment " + std::to_string(i);
        if (segment_duration(segments[i]) < 0.0) throw StructuralError("negative duration" + where);
        if (const auto* sh = std::get_if<Shift>(&segments[i])) {
            if (sh->ramp < 0.0 || sh->hold < 0.0) throw StructuralError("negative duration" + where);
            if (sh->target < params.omega_a - slack || sh->target > params.omega_b + slack)
                throw StructuralError("shift target outside [omega_a, omega_b]" + where);
        } else if (const auto* r = std::get_if<Rabi>(&segments[i])) {
            if (r->amplitude < 0.0) throw StructuralError("negative Rabi amplitude" + where);
        } else if (const auto* v = std::get_if<VirtualPhase>(&segments[i])) {
            std::set<std::size_t> seen;
            for (const auto& [st, ph] : v->table) {
                if (!sp.contains(st.q, st.na, st.nb)) throw StructuralError("phase table entry outside space" + where);
                if (!seen.insert(sp.index(st)).second) throw StructuralError("repeated phase table entry" + where);
            }
        }
    }
}

json params_to_json(const SystemParams& p) {
    return json{{"omega_a_GHz", to_ghz(p.omega_a)}, {"omega_b_GHz", to_ghz(p.omega_b)},
                {"omega_q_GHz", to_ghz(p.omega_q)}, {"g_a_MHz", to_mhz(p.g_a)},
                {"g_b_MHz", to_mhz(p.g_b)},         {"Omega_MHz", to_mhz(p.Omega)},
                {"na_max", p.na_max},               {"nb_max", p.nb_max}};
}

namespace {

double required_number(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing field '") + key + "'");
    if (!j.at(key).is_number()) throw ConfigError(std::string("field '") + key + "' must be a number");
    return j.at(key).get<double>();
}

double optional_number(const json& j, const char* key, double fallback) {
    return j.contains(key) ? required_number(j, key) : fallback;
}

}  // namespace

SystemParams params_from_json(const json& j, int default_na_max, int default_nb_max) {
    if (!j.is_object()) throw ConfigError("system parameters must be an object");
    SystemParams p;
    p.omega_a = ghz(required_number(j, "omega_a_GHz"));
    p.omega_b = ghz(required_number(j, "omega_b_GHz"));
    p.g_a = mhz(required_number(j, "g_a_MHz"));
    p.g_b = mhz(required_number(j, "g_b_MHz"));
    if (j.contains("omega_q_GHz")) {
        p.omega_q = ghz(required_number(j, "omega_q_GHz"));
    } else {
        if (!(p.omega_a < p.omega_b)) throw ConfigError("omega_a must be below omega_b");
        p.omega_q = matched_qubit_frequency(p.omega_a, p.omega_b, p.g_a, p.g_b);
    }
    if (j.contains("Omega_MHz")) {
        p.Omega = mhz(required_number(j, "Omega_MHz"));
    } else {
        if (p.omega_q == p.omega_a) throw ConfigError("qubit degenerate with resonator A");
        p.Omega = max_selective_amplitude(p).recommended;
    }
    p.na_max = static_cast<int>(optional_number(j, "na_max", default_na_max));
    p.nb_max = static_cast<int>(optional_number(j, "nb_max", default_nb_max));
    return p;
}

json schedule_to_json(const PulseSchedule& s) {
    json segs = json::array();
    for (const auto& seg : s.segments) {
        json r{{"kind", segment_kind(seg)}, {"duration_ns", to_ns(segment_duration(seg))}};
        if (const auto* sh = std::get_if<Shift>(&seg)) {
            r["omega_q_GHz"] = to_ghz(sh->target);
            r["ramp_ns"] = to_ns(sh->ramp);
            r["hold_ns"] = to_ns(sh->hold);
        } else if (const auto* rb = std::get_if<Rabi>(&seg)) {
            r["omega_d_GHz"] = to_ghz(rb->omega_d);
            r["phase_rad"] = rb->phase;
            r["amplitude_MHz"] = to_mhz(rb->amplitude);
        } else if (const auto* v = std::get_if<VirtualPhase>(&seg)) {
            json t = json::array();
            for (const auto& [st, ph] : v->table) t.push_back(json::array({st.q, st.na, st.nb, ph}));
            r["phase_table"] = t;
        }
        segs.push_back(r);
    }
    return json{{"params", params_to_json(s.params)},
                {"metadata",
                 {{"target", s.metadata.target},
                  {"estimated_duration_ns", to_ns(s.metadata.estimated_duration)},
                  {"gate_time_ns", to_ns(s.metadata.gate_time)},
                  {"shift_overhead_ns", to_ns(s.metadata.shift_overhead)},
                  {"total_duration_ns", to_ns(s.total_duration())},
                  {"warnings", s.metadata.warnings}}},
                {"segments", segs}};
}

PulseSchedule schedule_from_json(const json& j) {
    PulseSchedule s;
    try {
        s.params = params_from_json(j.at("params"));
        if (j.contains("metadata")) {
            const auto& m = j.at("metadata");
            s.metadata.target = m.value("target", "");
            s.metadata.estimated_duration = ns(m.value("estimated_duration_ns", 0.0));
            s.metadata.gate_time = ns(m.value("gate_time_ns", 0.0));
            s.metadata.shift_overhead = ns(m.value("shift_overhead_ns", 0.0));
            s.metadata.warnings = m.value("warnings", std::vector<std::string>{});
        }
        for (const auto& r : j.at("segments")) {
            const std::string kind = r.at("kind").get<std::string>();
            if (kind == "shift") {
                s.segments.emplace_back(Shift{ghz(required_number(r, "omega_q_GHz")), ns(required_number(r, "ramp_ns")),
                                              ns(required_number(r, "hold_ns"))});
            } else if (kind == "resonant_a") {
                s.segments.emplace_back(ResonantA{ns(required_number(r, "duration_ns"))});
            } else if (kind == "resonant_b") {
                s.segments.emplace_back(ResonantB{ns(required_number(r, "duration_ns"))});
            } else if (kind == "rabi") {
                s.segments.emplace_back(Rabi{ns(required_number(r, "duration_ns")), ghz(required_number(r, "omega_d_GHz")),
                                             required_number(r, "phase_rad"), mhz(required_number(r, "amplitude_MHz"))});
            } else if (kind == "virtual_phase") {
                VirtualPhase v;
                for (const auto& e : r.at("phase_table"))
                    v.table.push_back({{e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<int>()}, e.at(3).get<double>()});
                s.segments.emplace_back(std::move(v));
            } else {
                throw ConfigError("unknown segment kind '" + kind + "'");
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed schedule: ") + e.what());
    }
    s.validate();
    return s;
}

}  // namespace rqr
