// Command-line front end: synthesis, simulation, comparison, analysis and
// plotting over a single JSON config, with a content-addressed run registry.
#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hysta/analysis.hpp"
#include "hysta/config.hpp"
#include "hysta/plot.hpp"
#include "hysta/sim.hpp"
#include "hysta/synthesis.hpp"
#include "hysta/trace.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace hysta;

namespace {

struct CommonArgs {
    std::vector<std::string> configs;
    std::string preset_name = "paper-nominal";
    std::optional<std::uint64_t> seed;
    std::string out_dir = "runs";
    std::string controller;
    std::string sweep;
};

AppConfig resolve_config(const CommonArgs& args, std::size_t index = 0) {
    AppConfig cfg = index < args.configs.size() ? load_config(args.configs[index])
                                                : preset(args.preset_name);
    if (args.seed) cfg.scenario.noise.seed = *args.seed;
    if (!args.controller.empty()) {
        if (args.controller == "issta")
            cfg.scenario.controller = ControllerKind::Issta;
        else if (args.controller == "vgsta")
            cfg.scenario.controller = ControllerKind::Vgsta;
        else if (args.controller == "relay")
            cfg.scenario.controller = ControllerKind::RelayReach;
        else
            throw std::invalid_argument("unknown controller: " + args.controller +
                                        " (expected issta, vgsta or relay)");
    }
    return cfg;
}

std::string controller_name(ControllerKind k) {
    switch (k) {
    case ControllerKind::Issta: return "issta";
    case ControllerKind::Vgsta: return "vgsta";
    case ControllerKind::RelayReach: return "relay";
    }
    return "?";
}

json complex_to_json(const std::complex<double>& z) {
    return json{{"re", z.real()}, {"im", z.imag()}};
}

json design_to_json(const SurfaceDesign& d, const Certificate& cert,
                    const StaGains& g) {
    json j;
    j["gamma1"] = d.gamma1;
    j["gamma2"] = d.gamma2;
    j["kappa"] = d.kappa;
    j["alpha"] = d.alpha;
    j["mu_M"] = d.mu_M;
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            j["M"][r][c] = d.M(r, c);
            j["Y"][r][c] = d.Y(r, c);
        }
    for (int c = 0; c < 3; ++c) j["K"][c] = d.K(c);
    j["region"] = {{"h_slow", d.h_slow}, {"h_fast", d.h_fast},
                   {"theta", d.theta},   {"Psi", d.Psi}};
    for (const auto& e : d.closed_loop_eigs)
        j["closed_loop_eigs"].push_back(complex_to_json(e));
    j["certificate"] = {{"Y_positive_definite", cert.Y_positive_definite},
                        {"inequality_strict", cert.inequality_strict},
                        {"eigs_in_region", cert.eigs_in_region},
                        {"lambda_min_Y", cert.lambda_min_Y},
                        {"lambda_max_lhs", cert.lambda_max_lhs},
                        {"mu_M", cert.mu_M},
                        {"ok", cert.ok()}};
    j["sta"] = {{"k1", g.k1},
                {"k2", g.k2},
                {"rho", g.rho},
                {"L", g.L},
                {"lambda_max_Mk", g.lambda_max_Mk},
                {"rho_threshold", 2.0 * g.L * g.lambda_max_Mk},
                {"M_k", {{g.M_k(0, 0), g.M_k(0, 1)}, {g.M_k(1, 0), g.M_k(1, 1)}}}};
    return j;
}

void print_design_summary(const SurfaceDesign& d, const StaGains& g) {
    std::printf("%-16s %-14s %s\n", "parameter", "value", "origin");
    const auto row = [](const char* p, double v, const char* o) {
        std::printf("%-16s %-14.6g %s\n", p, v, o);
    };
    row("h_slow", d.h_slow, "strip edge (slow)");
    row("h_fast", d.h_fast, "strip edge (fast)");
    row("theta", d.theta, "cone half-angle");
    row("Psi", d.Psi, "perturbation slope bound");
    row("gamma1", d.gamma1, "surface gain");
    row("gamma2", d.gamma2, "surface gain");
    row("kappa", d.kappa, "surface gain");
    row("alpha", d.alpha, "coupling 4*tau*E*A/V_t");
    row("mu_M", d.mu_M, "decrease rate");
    row("k1", g.k1, "STA gain");
    row("k2", g.k2, "STA gain");
    row("rho", g.rho, "scaling factor");
    row("L", g.L, "perturbation-derivative bound");
    row("lambda_max(M_k)", g.lambda_max_Mk, "STA Lyapunov certificate");
    for (const auto& e : d.closed_loop_eigs)
        std::printf("%-16s %.6g%+.6gi\n", "closed-loop eig", e.real(), e.imag());
}

// ---- run registry -------------------------------------------------------

json load_registry(const fs::path& dir) {
    std::ifstream in(dir / "registry.json");
    if (!in) return json::object();
    json j;
    in >> j;
    return j;
}

void save_registry(const fs::path& dir, const json& j) {
    std::ofstream out(dir / "registry.json");
    out << j.dump(2) << "\n";
}

// ---- analysis window ----------------------------------------------------

// Table-2-style window [10, 14] when the horizon allows it; otherwise the
// final third of the run.
std::pair<double, double> default_window(double horizon) {
    if (horizon >= 14.0) return {10.0, 14.0};
    return {2.0 * horizon / 3.0, horizon};
}

json report_to_json(const PerformanceReport& r) {
    return json{{"M_e", r.M_e},
                {"mu_e", r.mu_e},
                {"sigma_e", r.sigma_e},
                {"ISE", r.ISE},
                {"steady_state_pct", r.steady_state_pct},
                {"t_start", r.t_start},
                {"t_end", r.t_end},
                {"samples", r.samples}};
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

void write_trace_panels(const SimTrace& tr, const std::string& path) {
    Panel pos{"position", "t [s]", "q [m]", {}};
    pos.series.push_back({"reference", tr.t, tr.r, ""});
    pos.series.push_back({"position", tr.t, tr.q_true, ""});
    Panel err{"tracking error", "t [s]", "e1 [m]", {}};
    err.series.push_back({"e1", tr.t, tr.e1, ""});
    Panel ctl{"control", "t [s]", "u, g [-]", {}};
    ctl.series.push_back({"u", tr.t, tr.u, ""});
    ctl.series.push_back({"g", tr.t, tr.g, ""});
    Panel sld{"sliding variable", "t [s]", "s", {}};
    sld.series.push_back({"s", tr.t, tr.s, ""});
    Panel prs{"load pressure", "t [s]", "P [Pa]", {}};
    prs.series.push_back({"P", tr.t, tr.P_true, ""});
    write_svg_panels({pos, err, ctl, sld, prs}, path);
}

struct RunArtifacts {
    SimTrace trace;
    fs::path trace_path, meta_path, report_path, svg_path;
    bool cached = false;
};

RunArtifacts run_and_record(const AppConfig& cfg, const fs::path& out_dir,
                            const std::string& tag = "") {
    fs::create_directories(out_dir);
    const std::string hash = canonical_hash(cfg);
    const std::string key =
        hash + "-" + std::to_string(cfg.scenario.noise.seed) +
        (tag.empty() ? "" : "-" + tag);

    RunArtifacts art;
    art.trace_path = out_dir / ("trace-" + key + ".csv");
    art.meta_path = out_dir / ("trace-" + key + ".meta.json");
    art.report_path = out_dir / ("report-" + key + ".json");
    art.svg_path = out_dir / ("plots-" + key + ".svg");

    json registry = load_registry(out_dir);
    if (registry.contains(key) && fs::exists(art.trace_path)) {
        art.trace = read_trace_csv(art.trace_path);
        art.trace.config_hash = hash;
        art.cached = true;
        return art;
    }

    SurfaceDesign design = solve_region_lmi(cfg.synthesis_input());
    StaGains gains =
        design_sta_gains(cfg.sta.k1, cfg.sta.k2, cfg.sta.L, cfg.sta.rho, false);
    art.trace = run(cfg.scenario, cfg.plant, design, gains, cfg.profile.build());
    art.trace.config_hash = hash;

    write_trace_csv(art.trace, art.trace_path.string());
    write_trace_metadata(art.trace, art.meta_path.string());
    const auto [t0, t1] = default_window(cfg.scenario.horizon);
    const PerformanceReport rep =
        performance_indices(art.trace, t0, t1, cfg.plant.stroke);
    json jrep = report_to_json(rep);
    jrep["config_hash"] = hash;
    jrep["seed"] = cfg.scenario.noise.seed;
    jrep["controller"] = controller_name(cfg.scenario.controller);
    jrep["max_abs_u"] = max_abs(art.trace.u);
    jrep["max_abs_g"] = max_abs(art.trace.g);
    std::ofstream(art.report_path) << jrep.dump(2) << "\n";
    write_trace_panels(art.trace, art.svg_path.string());

    registry[key] = {{"trace", art.trace_path.filename().string()},
                     {"metadata", art.meta_path.filename().string()},
                     {"report", art.report_path.filename().string()},
                     {"plots", art.svg_path.filename().string()},
                     {"config_hash", hash},
                     {"seed", cfg.scenario.noise.seed}};
    save_registry(out_dir, registry);
    return art;
}

// settling time of a step response: last instant |e1| sits outside the band,
// measured from the step; capped at horizon - t_step when never settled
double settling_time(const SimTrace& tr, double t_step, double band) {
    double settle = 0.0;
    for (std::size_t i = 0; i < tr.size(); ++i)
        if (tr.t[i] > t_step && std::abs(tr.e1[i]) > band)
            settle = tr.t[i] - t_step;
    return settle;
}

// ---- subcommands --------------------------------------------------------

int cmd_synthesize(const CommonArgs& args) {
    AppConfig cfg = resolve_config(args);
    const SynthesisInput input = cfg.synthesis_input();
    input.validate();
    SurfaceDesign design = cfg.synthesis.auto_theta
                               ? solve_region_lmi_auto_theta(input)
                               : solve_region_lmi(input);
    const Certificate cert = certify(design, input);
    StaGains gains =
        design_sta_gains(cfg.sta.k1, cfg.sta.k2, cfg.sta.L, cfg.sta.rho);
    if (!cert.ok()) {
        std::cerr << "certificate failed post-hoc verification\n";
        return kInfeasible;
    }
    fs::create_directories(args.out_dir);
    const std::string hash = canonical_hash(cfg);
    const fs::path path = fs::path(args.out_dir) / ("gains-" + hash + ".json");
    json j = design_to_json(design, cert, gains);
    j["config_hash"] = hash;
    std::ofstream(path) << j.dump(2) << "\n";
    print_design_summary(design, gains);
    std::cout << "gains file: " << path.string() << "\n";
    return kOk;
}

int cmd_simulate(const CommonArgs& args) {
    AppConfig base = resolve_config(args);

    if (!args.sweep.empty()) {
        // --sweep rho=2,5,10,20 fans out to independent parallel runs
        const auto eq = args.sweep.find('=');
        if (eq == std::string::npos || args.sweep.substr(0, eq) != "rho")
            throw std::invalid_argument("only rho sweeps are supported: --sweep rho=2,5,10,20");
        std::vector<double> rhos;
        std::stringstream ss(args.sweep.substr(eq + 1));
        std::string tok;
        while (std::getline(ss, tok, ',')) rhos.push_back(std::stod(tok));
        if (rhos.empty()) throw std::invalid_argument("empty sweep list");

        std::vector<std::future<RunArtifacts>> jobs;
        for (double rho : rhos) {
            AppConfig cfg = base;
            cfg.sta.rho = rho;
            jobs.push_back(std::async(std::launch::async, [cfg, &args] {
                return run_and_record(cfg, args.out_dir);
            }));
        }
        json summary = json::array();
        Panel overlay{"step response vs reaching gain", "t [s]", "e1 [m]", {}};
        for (std::size_t i = 0; i < rhos.size(); ++i) {
            RunArtifacts art = jobs[i].get();
            const double band = 0.05 * base.profile.amplitude;
            const double settle =
                settling_time(art.trace, base.profile.t_step, band);
            summary.push_back({{"rho", rhos[i]},
                               {"settling_time", settle},
                               {"max_abs_u", max_abs(art.trace.u)},
                               {"trace", art.trace_path.filename().string()},
                               {"cached", art.cached}});
            char label[32];
            std::snprintf(label, sizeof(label), "rho=%g", rhos[i]);
            overlay.series.push_back({label, art.trace.t, art.trace.e1, ""});
            std::printf("rho=%-6g settle=%.4f s  max|u|=%.4g%s\n", rhos[i], settle,
                        max_abs(art.trace.u), art.cached ? "  (cached)" : "");
        }
        const fs::path sweep_json = fs::path(args.out_dir) / "sweep-rho.json";
        const fs::path sweep_svg = fs::path(args.out_dir) / "sweep-rho.svg";
        std::ofstream(sweep_json) << summary.dump(2) << "\n";
        write_svg_panels({overlay}, sweep_svg.string());
        std::cout << "sweep summary: " << sweep_json.string() << "\n";
        return kOk;
    }

    RunArtifacts art = run_and_record(base, args.out_dir);
    if (art.cached)
        std::cout << "cached artifact: " << art.trace_path.string() << "\n";
    else
        std::cout << "trace: " << art.trace_path.string() << "\n"
                  << "report: " << art.report_path.string() << "\n"
                  << "plots: " << art.svg_path.string() << "\n";
    return kOk;
}

int cmd_compare(const CommonArgs& args) {
    AppConfig a = resolve_config(args, 0);
    AppConfig b;
    if (args.configs.size() >= 2) {
        b = resolve_config(args, 1);
    } else {
        b = a;
        b.scenario.controller = a.scenario.controller == ControllerKind::Vgsta
                                    ? ControllerKind::Issta
                                    : ControllerKind::Vgsta;
    }
    {
        AppConfig pa = a, pb = b; // profile equality modulo controller choice
        pa.scenario.controller = pb.scenario.controller = ControllerKind::Issta;
        pa.scenario.issta_options = pb.scenario.issta_options = IsstaOptions{};
        pa.scenario.vgsta_options = pb.scenario.vgsta_options = VgstaOptions{};
        if (canonical_hash(pa) != canonical_hash(pb)) {
            std::cerr << "compare: the two configs disagree beyond the controller choice\n";
            return kConfigError;
        }
    }

    RunArtifacts ra = run_and_record(a, args.out_dir);
    RunArtifacts rb = run_and_record(b, args.out_dir);
    const auto [t0, t1] = default_window(a.scenario.horizon);
    const PerformanceReport pa = performance_indices(ra.trace, t0, t1, a.plant.stroke);
    const PerformanceReport pb = performance_indices(rb.trace, t0, t1, b.plant.stroke);

    json j;
    j["a"] = {{"controller", controller_name(a.scenario.controller)},
              {"indices", report_to_json(pa)},
              {"max_abs_u", max_abs(ra.trace.u)},
              {"max_abs_g", max_abs(ra.trace.g)}};
    j["b"] = {{"controller", controller_name(b.scenario.controller)},
              {"indices", report_to_json(pb)},
              {"max_abs_u", max_abs(rb.trace.u)},
              {"max_abs_g", max_abs(rb.trace.g)}};
    j["mu_e_ratio"] = pb.mu_e > 0.0 ? pa.mu_e / pb.mu_e : 0.0;
    j["control_amplitude_note"] =
        "realized valve commands: max|g_a| vs max|g_b| printed above";

    Panel err{"tracking error", "t [s]", "e1 [m]", {}};
    err.series.push_back({controller_name(a.scenario.controller), ra.trace.t,
                          ra.trace.e1, ""});
    err.series.push_back({controller_name(b.scenario.controller), rb.trace.t,
                          rb.trace.e1, ""});
    Panel ctl{"valve command", "t [s]", "g [-]", {}};
    ctl.series.push_back({controller_name(a.scenario.controller), ra.trace.t,
                          ra.trace.g, ""});
    ctl.series.push_back({controller_name(b.scenario.controller), rb.trace.t,
                          rb.trace.g, ""});
    const std::string key = canonical_hash(a).substr(0, 8) + "-" +
                            canonical_hash(b).substr(0, 8);
    const fs::path jpath = fs::path(args.out_dir) / ("compare-" + key + ".json");
    const fs::path spath = fs::path(args.out_dir) / ("compare-" + key + ".svg");
    std::ofstream(jpath) << j.dump(2) << "\n";
    write_svg_panels({err, ctl}, spath.string());
    std::printf("%-8s mu_e=%.4g m  M_e=%.4g m  max|u|=%.4g  max|g|=%.4g\n",
                controller_name(a.scenario.controller).c_str(), pa.mu_e, pa.M_e,
                max_abs(ra.trace.u), max_abs(ra.trace.g));
    std::printf("%-8s mu_e=%.4g m  M_e=%.4g m  max|u|=%.4g  max|g|=%.4g\n",
                controller_name(b.scenario.controller).c_str(), pb.mu_e, pb.M_e,
                max_abs(rb.trace.u), max_abs(rb.trace.g));
    std::cout << "report: " << jpath.string() << "\n";
    return kOk;
}

int cmd_analyze(const CommonArgs& args, const std::string& trace_path) {
    SimTrace tr = read_trace_csv(trace_path);
    AppConfig cfg = resolve_config(args);
    const double horizon = tr.t.empty() ? 0.0 : tr.t.back();
    const auto [t0, t1] = default_window(horizon);
    const PerformanceReport rep = performance_indices(tr, t0, t1, cfg.plant.stroke);
    json j = report_to_json(rep);
    j["max_abs_u"] = max_abs(tr.u);
    j["max_abs_g"] = max_abs(tr.g);
    std::printf("window [%g, %g] s over %zu samples\n", rep.t_start, rep.t_end,
                rep.samples);
    std::printf("M_e      = %.6g m\n", rep.M_e);
    std::printf("mu_e     = %.6g m\n", rep.mu_e);
    std::printf("sigma_e  = %.6g m\n", rep.sigma_e);
    std::printf("ISE      = %.6g\n", rep.ISE);
    std::printf("steady-state error = %.4g %% of stroke\n", rep.steady_state_pct);
    fs::create_directories(args.out_dir);
    const fs::path out = fs::path(args.out_dir) /
                         (fs::path(trace_path).stem().string() + ".analysis.json");
    std::ofstream(out) << j.dump(2) << "\n";
    std::cout << "report: " << out.string() << "\n";
    return kOk;
}

int cmd_chatter(const CommonArgs& args, double T_s, double omega) {
    AppConfig cfg = resolve_config(args);
    if (T_s <= 0.0) T_s = 1.0 / cfg.synthesis.h_fast;
    if (omega <= 0.0) omega = 1.0 / T_s;
    const ChatterPrediction p =
        chatter_predict(cfg.sta.k1, cfg.sta.k2, cfg.sta.rho, cfg.sta.L, T_s, omega);
    const double residual = (omega * omega / (T_s * T_s)) * p.a_y * p.a_y +
                            p.gamma_a * p.gamma_a * p.a_y - p.a1 * p.a1;
    std::printf("T_s=%g s  omega=%g rad/s\n", p.T_s, p.omega);
    std::printf("gamma_a = %.8g\n", p.gamma_a);
    std::printf("a1      = %.8g\n", p.a1);
    std::printf("a_y     = %.8g (quadratic residual %.3g)\n", p.a_y, residual);
    std::printf("phi_d   = %.8g rad\n", p.phi_d);
    std::printf("\nphase deficit vs parasitic time constant (decade sweep):\n");
    json sweep = json::array();
    for (int k = 0; k <= 6; ++k) {
        const double ts = T_s * std::pow(10.0, -k);
        const ChatterPrediction pk =
            chatter_predict(cfg.sta.k1, cfg.sta.k2, cfg.sta.rho, cfg.sta.L, ts, omega);
        std::printf("  T_s=%-10.3g phi_d=%.6g rad\n", ts, pk.phi_d);
        sweep.push_back({{"T_s", ts}, {"phi_d", pk.phi_d}});
    }
    fs::create_directories(args.out_dir);
    json j = {{"gamma_a", p.gamma_a}, {"a1", p.a1},     {"a_y", p.a_y},
              {"phi_d", p.phi_d},     {"T_s", p.T_s},   {"omega", p.omega},
              {"residual", residual}, {"sweep", sweep}};
    const fs::path out = fs::path(args.out_dir) / "chatter.json";
    std::ofstream(out) << j.dump(2) << "\n";
    std::cout << "report: " << out.string() << "\n";
    return kOk;
}

int cmd_plot(const CommonArgs& args, const std::string& trace_path) {
    SimTrace tr = read_trace_csv(trace_path);
    fs::create_directories(args.out_dir);
    const fs::path out = fs::path(args.out_dir) /
                         (fs::path(trace_path).stem().string() + ".svg");
    write_trace_panels(tr, out.string());
    std::cout << "plots: " << out.string() << "\n";
    return kOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"hydraulic-cylinder sliding-mode synthesis & simulation toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string trace_path;
    double chatter_Ts = 0.0, chatter_omega = 0.0;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", args.configs, "JSON config file (repeatable)");
        sub->add_option("--preset", args.preset_name,
                        "built-in preset: paper-nominal, paper-vgsta, step, stabilization");
        sub->add_option("--seed", args.seed, "noise seed override");
        sub->add_option("--out", args.out_dir, "output directory (default: runs)");
        sub->add_option("--controller", args.controller,
                        "controller override: issta, vgsta, relay");
        sub->add_option("--sweep", args.sweep, "parameter sweep, e.g. rho=2,5,10,20");
    };

    CLI::App* synth = app.add_subcommand("synthesize", "solve the surface LMIs and write a gains file");
    CLI::App* sim = app.add_subcommand("simulate", "run a closed-loop scenario");
    CLI::App* cmp = app.add_subcommand("compare", "run both controllers and report side by side");
    CLI::App* ana = app.add_subcommand("analyze", "performance indices of an existing trace");
    CLI::App* cht = app.add_subcommand("chatter", "describing-function chattering prediction");
    CLI::App* plt = app.add_subcommand("plot", "render SVG panels from an existing trace");
    for (CLI::App* sub : {synth, sim, cmp, ana, cht, plt}) add_common(sub);
    ana->add_option("trace", trace_path, "trace CSV file")->required();
    plt->add_option("trace", trace_path, "trace CSV file")->required();
    cht->add_option("--ts", chatter_Ts, "parasitic loop time constant [s]");
    cht->add_option("--omega", chatter_omega, "analysis frequency [rad/s]");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return cmd_synthesize(args);
        if (sim->parsed()) return cmd_simulate(args);
        if (cmp->parsed()) return cmd_compare(args);
        if (ana->parsed()) return cmd_analyze(args, trace_path);
        if (cht->parsed()) return cmd_chatter(args, chatter_Ts, chatter_omega);
        if (plt->parsed()) return cmd_plot(args, trace_path);
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kInfeasible;
    } catch (const SimulationBlowup& e) {
        std::cerr << "simulation blow-up: " << e.what() << "\n";
        return kBlowup;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kConfigError;
    }
    return kOk;
}
