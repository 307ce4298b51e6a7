#include "hysta/config.hpp"

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace hysta {

using nlohmann::json;

ReferenceProfile ProfileSpec::build() const {
    if (kind == "paper") return paper_profile(ramp_target, horizon);
    if (kind == "step") return step_profile(amplitude, t_step, horizon);
    if (kind == "zero") {
        Segment hold;
        hold.kind = Segment::Kind::Hold;
        hold.t_start = 0.0;
        hold.t_end = horizon;
        hold.coeff = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
        return ReferenceProfile({hold});
    }
    throw std::invalid_argument("profile kind must be paper, step or zero: " + kind);
}

SynthesisInput AppConfig::synthesis_input() const {
    SynthesisInput in;
    in.params = plant;
    in.Psi = synthesis.Psi;
    in.h_slow = synthesis.h_slow;
    in.h_fast = synthesis.h_fast;
    in.theta = synthesis.theta;
    in.margin = synthesis.margin;
    return in;
}

namespace {

json schedule_to_json(const Schedule& s) {
    json a = json::array();
    for (const auto& [t, v] : s.steps) a.push_back({{"t", t}, {"value", v}});
    return a;
}

Schedule schedule_from_json(const json& a) {
    Schedule s;
    for (const auto& e : a)
        s.steps.emplace_back(e.at("t").get<double>(), e.at("value").get<double>());
    return s;
}

std::string controller_to_string(ControllerKind k) {
    switch (k) {
    case ControllerKind::Issta: return "issta";
    case ControllerKind::Vgsta: return "vgsta";
    case ControllerKind::RelayReach: return "relay";
    }
    throw std::invalid_argument("unknown controller kind");
}

ControllerKind controller_from_string(const std::string& s) {
    if (s == "issta") return ControllerKind::Issta;
    if (s == "vgsta") return ControllerKind::Vgsta;
    if (s == "relay") return ControllerKind::RelayReach;
    throw std::invalid_argument("controller must be issta, vgsta or relay: " + s);
}

json to_json_impl(const AppConfig& c) {
    json j;
    const PlantParams& p = c.plant;
    j["plant"] = {
        {"m", p.m},         {"sigma", p.sigma}, {"A", p.A},
        {"E", p.E},         {"V_t", p.V_t},     {"C_L", p.C_L},
        {"K_f", p.K_f},     {"P_S", p.P_S},     {"F_c", p.F_c},
        {"F_s", p.F_s},     {"chi", p.chi},     {"iota", p.iota},
        {"vartheta", p.vartheta}, {"omega_0", p.omega_0}, {"zeta_v", p.zeta_v},
        {"c_d", p.c_d},     {"c_s", p.c_s},     {"C_qp", p.C_qp},
        {"C_q", p.C_q},     {"tau", p.tau},     {"stroke", p.stroke},
        {"relief_frac", p.relief_frac},         {"C_relief", p.C_relief},
        {"q_min", p.q_min}};
    j["synthesis"] = {{"Psi", c.synthesis.Psi},
                      {"h_slow", c.synthesis.h_slow},
                      {"h_fast", c.synthesis.h_fast},
                      {"theta", c.synthesis.theta},
                      {"margin", c.synthesis.margin},
                      {"auto_theta", c.synthesis.auto_theta},
                      {"auto_psi", c.synthesis.auto_psi}};
    j["sta"] = {{"k1", c.sta.k1}, {"k2", c.sta.k2}, {"rho", c.sta.rho}, {"L", c.sta.L}};
    const ScenarioConfig& s = c.scenario;
    j["scenario"] = {
        {"plant_model", s.plant_model == PlantModel::Linear ? "linear" : "nonlinear"},
        {"valve_dynamics", s.valve_dynamics},
        {"controller", controller_to_string(s.controller)},
        {"dt_control", s.dt_control},
        {"dt_plant", s.dt_plant},
        {"horizon", s.horizon},
        {"noise",
         {{"enabled", s.noise.enabled},
          {"power", s.noise.power},
          {"sample_time", s.noise.sample_time},
          {"on_q", s.noise.on_q},
          {"on_P", s.noise.on_P},
          {"scale_q", s.noise.scale_q},
          {"scale_P", s.noise.scale_P},
          {"seed", s.noise.seed}}},
        {"F_L", schedule_to_json(s.F_L)},
        {"delta_P", schedule_to_json(s.delta_P)},
        {"initial_state",
         {{"q", s.initial_state.q},
          {"q_dot", s.initial_state.q_dot},
          {"P", s.initial_state.P}}},
        {"issta_options",
         {{"D_s", s.issta_options.D_s},
          {"mu_c", s.issta_options.mu_c},
          {"deadzone_inverse", s.issta_options.deadzone_inverse},
          {"prefilter", s.issta_options.prefilter},
          {"meas_tau", s.issta_options.meas_tau}}},
        {"vgsta_options",
         {{"error_vs_reference_model", s.vgsta_options.error_vs_reference_model},
          {"anti_windup", s.vgsta_options.anti_windup},
          {"delta_k", s.vgsta_options.constants.delta_k},
          {"eps_k", s.vgsta_options.constants.eps_k},
          {"meas_tau", s.vgsta_options.meas_tau},
          {"mu_c", s.vgsta_options.mu_c},
          {"deadzone_inverse", s.vgsta_options.deadzone_inverse},
          {"D_s", s.vgsta_options.D_s},
          {"L_u_cap", s.vgsta_options.L_u_cap}}},
        {"relay_K_s", s.relay_K_s}};
    j["profile"] = {{"kind", c.profile.kind},
                    {"ramp_target", c.profile.ramp_target},
                    {"horizon", c.profile.horizon},
                    {"amplitude", c.profile.amplitude},
                    {"t_step", c.profile.t_step}};
    return j;
}

template <typename T>
void get_if_present(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

AppConfig from_json_impl(const json& j) {
    AppConfig c;
    if (j.contains("plant")) {
        const json& p = j.at("plant");
        get_if_present(p, "m", c.plant.m);
        get_if_present(p, "sigma", c.plant.sigma);
        get_if_present(p, "A", c.plant.A);
        get_if_present(p, "E", c.plant.E);
        get_if_present(p, "V_t", c.plant.V_t);
        get_if_present(p, "C_L", c.plant.C_L);
        get_if_present(p, "K_f", c.plant.K_f);
        get_if_present(p, "P_S", c.plant.P_S);
        get_if_present(p, "F_c", c.plant.F_c);
        get_if_present(p, "F_s", c.plant.F_s);
        get_if_present(p, "chi", c.plant.chi);
        get_if_present(p, "iota", c.plant.iota);
        get_if_present(p, "vartheta", c.plant.vartheta);
        get_if_present(p, "omega_0", c.plant.omega_0);
        get_if_present(p, "zeta_v", c.plant.zeta_v);
        get_if_present(p, "c_d", c.plant.c_d);
        get_if_present(p, "c_s", c.plant.c_s);
        get_if_present(p, "C_qp", c.plant.C_qp);
        get_if_present(p, "C_q", c.plant.C_q);
        get_if_present(p, "tau", c.plant.tau);
        get_if_present(p, "relief_frac", c.plant.relief_frac);
        get_if_present(p, "C_relief", c.plant.C_relief);
        get_if_present(p, "q_min", c.plant.q_min);
        get_if_present(p, "stroke", c.plant.stroke);
    }
    if (j.contains("synthesis")) {
        const json& s = j.at("synthesis");
        get_if_present(s, "Psi", c.synthesis.Psi);
        get_if_present(s, "h_slow", c.synthesis.h_slow);
        get_if_present(s, "h_fast", c.synthesis.h_fast);
        get_if_present(s, "theta", c.synthesis.theta);
        get_if_present(s, "margin", c.synthesis.margin);
        get_if_present(s, "auto_theta", c.synthesis.auto_theta);
        get_if_present(s, "auto_psi", c.synthesis.auto_psi);
    }
    if (j.contains("sta")) {
        const json& s = j.at("sta");
        get_if_present(s, "k1", c.sta.k1);
        get_if_present(s, "k2", c.sta.k2);
        get_if_present(s, "rho", c.sta.rho);
        get_if_present(s, "L", c.sta.L);
    }
    if (j.contains("scenario")) {
        const json& s = j.at("scenario");
        if (s.contains("plant_model")) {
            const std::string m = s.at("plant_model").get<std::string>();
            if (m == "linear") c.scenario.plant_model = PlantModel::Linear;
            else if (m == "nonlinear") c.scenario.plant_model = PlantModel::Nonlinear;
            else throw std::invalid_argument("plant_model must be linear or nonlinear: " + m);
        }
        get_if_present(s, "valve_dynamics", c.scenario.valve_dynamics);
        if (s.contains("controller"))
            c.scenario.controller =
                controller_from_string(s.at("controller").get<std::string>());
        get_if_present(s, "dt_control", c.scenario.dt_control);
        get_if_present(s, "dt_plant", c.scenario.dt_plant);
        get_if_present(s, "horizon", c.scenario.horizon);
        if (s.contains("noise")) {
            const json& n = s.at("noise");
            get_if_present(n, "enabled", c.scenario.noise.enabled);
            get_if_present(n, "power", c.scenario.noise.power);
            get_if_present(n, "sample_time", c.scenario.noise.sample_time);
            get_if_present(n, "on_q", c.scenario.noise.on_q);
            get_if_present(n, "on_P", c.scenario.noise.on_P);
            get_if_present(n, "scale_q", c.scenario.noise.scale_q);
            get_if_present(n, "scale_P", c.scenario.noise.scale_P);
            get_if_present(n, "seed", c.scenario.noise.seed);
        }
        if (s.contains("F_L")) c.scenario.F_L = schedule_from_json(s.at("F_L"));
        if (s.contains("delta_P")) c.scenario.delta_P = schedule_from_json(s.at("delta_P"));
        if (s.contains("initial_state")) {
            const json& x = s.at("initial_state");
            get_if_present(x, "q", c.scenario.initial_state.q);
            get_if_present(x, "q_dot", c.scenario.initial_state.q_dot);
            get_if_present(x, "P", c.scenario.initial_state.P);
        }
        if (s.contains("issta_options")) {
            const json& o = s.at("issta_options");
            get_if_present(o, "D_s", c.scenario.issta_options.D_s);
            get_if_present(o, "mu_c", c.scenario.issta_options.mu_c);
            get_if_present(o, "deadzone_inverse", c.scenario.issta_options.deadzone_inverse);
            get_if_present(o, "prefilter", c.scenario.issta_options.prefilter);
            get_if_present(o, "meas_tau", c.scenario.issta_options.meas_tau);
        }
        if (s.contains("vgsta_options")) {
            const json& o = s.at("vgsta_options");
            get_if_present(o, "error_vs_reference_model",
                           c.scenario.vgsta_options.error_vs_reference_model);
            get_if_present(o, "anti_windup", c.scenario.vgsta_options.anti_windup);
            get_if_present(o, "delta_k", c.scenario.vgsta_options.constants.delta_k);
            get_if_present(o, "eps_k", c.scenario.vgsta_options.constants.eps_k);
            get_if_present(o, "meas_tau", c.scenario.vgsta_options.meas_tau);
            get_if_present(o, "mu_c", c.scenario.vgsta_options.mu_c);
            get_if_present(o, "deadzone_inverse",
                           c.scenario.vgsta_options.deadzone_inverse);
            get_if_present(o, "D_s", c.scenario.vgsta_options.D_s);
            get_if_present(o, "L_u_cap", c.scenario.vgsta_options.L_u_cap);
        }
        get_if_present(s, "relay_K_s", c.scenario.relay_K_s);
    }
    if (j.contains("profile")) {
        const json& p = j.at("profile");
        get_if_present(p, "kind", c.profile.kind);
        get_if_present(p, "ramp_target", c.profile.ramp_target);
        get_if_present(p, "horizon", c.profile.horizon);
        get_if_present(p, "amplitude", c.profile.amplitude);
        get_if_present(p, "t_step", c.profile.t_step);
    }
    return c;
}

} // namespace

AppConfig preset(const std::string& name) {
    AppConfig c; // defaults are the paper-nominal configuration
    if (name == "paper-nominal") return c;
    if (name == "paper-vgsta") {
        c.scenario.controller = ControllerKind::Vgsta;
        return c;
    }
    if (name == "step") {
        c.profile.kind = "step";
        c.profile.horizon = 6.0;
        c.scenario.horizon = 6.0;
        // A clean deterministic step experiment for reaching-law gain sweeps.
        // The pole strip is stiffer than the tracking preset so the step
        // response is limited by the reaching phase, which the gain scales;
        // with the tracking strip the settling tail is a friction creep along
        // the sliding surface that no reaching gain can speed up.
        c.scenario.noise.enabled = false;
        c.synthesis.h_slow = 2.0;
        c.synthesis.h_fast = 10.0;
        // Lighter loop filters: there is no noise to average, and their lag
        // otherwise dominates the chatter of the high-gain end of the sweep.
        c.scenario.issta_options.meas_tau = 0.002;
        c.scenario.issta_options.mu_c = 0.002;
        return c;
    }
    if (name == "stabilization") {
        c.profile.kind = "zero";
        c.profile.horizon = 6.0;
        c.scenario.horizon = 6.0;
        c.scenario.noise.enabled = false;
        c.scenario.initial_state.q = 0.05;
        return c;
    }
    throw std::invalid_argument(
        "unknown preset (expected paper-nominal, paper-vgsta, step or stabilization): " +
        name);
}

AppConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return config_from_json(text);
}

void save_config(const AppConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_config: cannot open " + path);
    out << config_to_json(config) << "\n";
}

std::string config_to_json(const AppConfig& config) {
    return to_json_impl(config).dump(2);
}

AppConfig config_from_json(const std::string& text) {
    return from_json_impl(json::parse(text));
}

std::string canonical_hash(const AppConfig& config) {
    // nlohmann::json objects keep keys sorted, so dump() is canonical
    const std::string canon = to_json_impl(config).dump();
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : canon) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace hysta
