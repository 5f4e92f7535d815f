// mixlab -- command line front end.
//
// Subcommands: simulate, two-point, correlate, verify, coeffs, sweep-kappa,
// fit, spectrum. Every run writes its results as CSV plus a meta.json with
// the full configuration, seeds, build id and thread count. Options can be
// preloaded from a flat key=value config file (--config); explicit flags
// win over config values.

#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "mixlab/exponents.hpp"
#include "mixlab/experiments.hpp"
#include "mixlab/hardy.hpp"
#include "mixlab/io.hpp"
#include "mixlab/two_point.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mixlab;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    int threads = 2;
};

Config load_config(const GlobalOpts& g) {
    return g.config_path.empty() ? Config{} : Config::from_file(g.config_path);
}

fs::path ensure_out(const GlobalOpts& g) {
    fs::path dir(g.out_dir);
    fs::create_directories(dir);
    return dir;
}

// Apply a config value only when the flag was not given on the command line.
template <typename T>
void fill(const CLI::Option* opt, const Config& cfg, const std::string& key, T& value) {
    if (opt->count() > 0 || !cfg.has(key)) return;
    if constexpr (std::is_same_v<T, std::string>) {
        value = cfg.get(key, value);
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
        value = cfg.get_u64(key, value);
    } else if constexpr (std::is_integral_v<T>) {
        value = cfg.get(key, static_cast<int>(value));
    } else {
        value = cfg.get(key, static_cast<double>(value));
    }
}

ScalarFn scalar_preset(const std::string& name) {
    if (name == "sin_x1") return [](Vec2 p) { return std::sin(p.x); };
    if (name == "sin_x2") return [](Vec2 p) { return std::sin(p.y); };
    if (name == "cos_x1") return [](Vec2 p) { return std::cos(p.x); };
    if (name == "cos_x2") return [](Vec2 p) { return std::cos(p.y); };
    if (name == "sin_x1_sin_x2") return [](Vec2 p) { return std::sin(p.x) * std::sin(p.y); };
    throw MixlabError("unknown scalar preset: " + name);
}

json fit_to_json(const DecayFit& f) {
    return json{{"rate", f.rate},         {"intercept", f.intercept},
                {"t0", f.t0},             {"t1", f.t1},
                {"r_squared", f.r_squared}, {"degenerate", f.degenerate},
                {"truncated", f.truncated}, {"series_id", f.series_id}};
}

// ---------------------------------------------------------------------------

int cmd_simulate(const GlobalOpts& g, const Config& file_cfg, CLI::App* cmd) {
    int n = 256, record_every = 100, realizations = 1, kmax = 8, snapshot_every = 0;
    double kappa = 0.0, dt = 1e-3, t_final = 10.0, nu = 4.0;
    std::string flow = "random_cellular", theta0 = "sine";
    auto* o_n = cmd->get_option("--n");
    auto* o_kappa = cmd->get_option("--kappa");
    auto* o_dt = cmd->get_option("--dt");
    auto* o_tf = cmd->get_option("--t-final");
    auto* o_nu = cmd->get_option("--nu");
    auto* o_flow = cmd->get_option("--flow");
    auto* o_theta = cmd->get_option("--theta0");
    auto* o_rec = cmd->get_option("--record-every");
    auto* o_real = cmd->get_option("--realizations");
    auto* o_kmax = cmd->get_option("--kmax");
    auto* o_snap = cmd->get_option("--snapshot-every");
    n = o_n->as<int>();
    kappa = o_kappa->as<double>();
    dt = o_dt->as<double>();
    t_final = o_tf->as<double>();
    nu = o_nu->as<double>();
    flow = o_flow->as<std::string>();
    theta0 = o_theta->as<std::string>();
    record_every = o_rec->as<int>();
    realizations = o_real->as<int>();
    kmax = o_kmax->as<int>();
    snapshot_every = o_snap->as<int>();
    fill(o_n, file_cfg, "sim.n", n);
    fill(o_kappa, file_cfg, "sim.kappa", kappa);
    fill(o_dt, file_cfg, "sim.dt", dt);
    fill(o_tf, file_cfg, "sim.t_final", t_final);
    fill(o_rec, file_cfg, "sim.record_every", record_every);
    fill(o_real, file_cfg, "sim.realizations", realizations);
    fill(o_theta, file_cfg, "sim.theta0", theta0);
    fill(o_kmax, file_cfg, "sim.kmax", kmax);
    fill(o_flow, file_cfg, "flow.kind", flow);
    fill(o_nu, file_cfg, "flow.nu", nu);

    const fs::path dir = ensure_out(g);
    CsvWriter csv({"t", "h_minus1", "l2", "h1", "realization"});
    std::vector<std::uint64_t> seeds;
    const FlowKind kind = flow_kind_from_string(flow);

    for (int r = 0; r < realizations; ++r) {
        SimulationConfig cfg;
        cfg.n = n;
        cfg.kappa = kappa;
        cfg.dt = dt;
        cfg.t_final = t_final;
        cfg.record_every = record_every;
        cfg.realization = static_cast<std::uint64_t>(r);
        cfg.theta0 = InitialData::from_name(theta0, n, kmax, split_seed(g.seed, 77));
        cfg.flow.kind = kind;
        const std::uint64_t rs = split_seed(g.seed, static_cast<std::uint64_t>(r));
        seeds.push_back(rs);
        if (kind == FlowKind::random_cellular) {
            cfg.flow.shift = std::make_shared<ShiftPath>(sample_shift_path(nu, dt, t_final, rs));
            cfg.flow.shift->export_csv(dir / ("shift_" + std::to_string(r) + ".csv"));
        }
        int snap_id = 0;
        auto on_record = [&](double t, const Spectrum2D& s) {
            if (snapshot_every > 0) {
                static thread_local int counter = 0;
                if (counter++ % snapshot_every == 0) {
                    write_mxc1(dir / ("theta_r" + std::to_string(r) + "_" +
                                      std::to_string(snap_id++) + ".mxc1"),
                               inverse(s));
                }
            }
            (void)t;
        };
        const NormSeries series = solve(cfg, snapshot_every > 0
                                                 ? std::function<void(double, const Spectrum2D&)>(
                                                       on_record)
                                                 : nullptr);
        for (const auto& w : series.warnings) std::cerr << "warning: " << w << "\n";
        for (std::size_t i = 0; i < series.times.size(); ++i) {
            csv.add_row({series.times[i], series.h_minus1[i], series.l2[i], series.h1[i],
                         static_cast<double>(r)});
        }
    }
    csv.save(dir / "norms.csv");

    Config meta_cfg = file_cfg;
    meta_cfg.set("sim.n", std::to_string(n));
    meta_cfg.set("sim.kappa", std::to_string(kappa));
    meta_cfg.set("sim.dt", std::to_string(dt));
    meta_cfg.set("sim.t_final", std::to_string(t_final));
    meta_cfg.set("flow.kind", flow);
    meta_cfg.set("flow.nu", std::to_string(nu));
    meta_cfg.set("flow.seed", std::to_string(g.seed));
    meta_cfg.set("sim.theta0", theta0);
    write_meta(dir, meta_cfg, seeds, g.threads);
    std::cout << "wrote " << (dir / "norms.csv") << "\n";
    return 0;
}

int cmd_two_point(const GlobalOpts& g, const Config& file_cfg, CLI::App* cmd) {
    int n = cmd->get_option("--n")->as<int>();
    double nu = cmd->get_option("--nu")->as<double>();
    double kappa = cmd->get_option("--kappa")->as<double>();
    double t_final = cmd->get_option("--t-final")->as<double>();
    double dt = cmd->get_option("--dt")->as<double>();
    int record_every = cmd->get_option("--record-every")->as<int>();
    std::string preset = cmd->get_option("--preset")->as<std::string>();
    bool snapshots = cmd->get_option("--snapshots")->as<bool>();
    fill(cmd->get_option("--n"), file_cfg, "two_point.n", n);
    fill(cmd->get_option("--nu"), file_cfg, "flow.nu", nu);
    fill(cmd->get_option("--kappa"), file_cfg, "two_point.kappa", kappa);

    const fs::path dir = ensure_out(g);
    const Field2D theta0 = InitialData::sine().sample(n);
    Field6D f0 = build_initial(theta0, uniform_density(n));
    TwoPointState state = make_two_point_state(std::move(f0), kappa, nu);
    if (snapshots) write_mxc1(dir / "two_point_t0.mxc1", state.f);

    const CoefficientSet coeffs = CoefficientSet::preset(preset, 0.5, nu);
    const TwoPointSeries series = two_point_solve(state, coeffs, dt, t_final, record_every);
    if (snapshots) write_mxc1(dir / "two_point_final.mxc1", state.f);

    CsvWriter csv({"t", "l2", "phi", "psi", "h1w", "gronwall_residual", "xmean"});
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        csv.add_row({series.times[i], series.l2[i], series.phi[i], series.psi[i], series.h1w[i],
                     series.gronwall_residual[i], series.xmean[i]});
    }
    csv.save(dir / "two_point.csv");

    Config meta_cfg = file_cfg;
    meta_cfg.set("two_point.n", std::to_string(n));
    meta_cfg.set("two_point.kappa", std::to_string(kappa));
    meta_cfg.set("flow.nu", std::to_string(nu));
    meta_cfg.set("two_point.preset", preset);
    write_meta(dir, meta_cfg, {g.seed}, g.threads);
    std::cout << "wrote " << (dir / "two_point.csv") << "\n";
    return 0;
}

int cmd_correlate(const GlobalOpts& g, const Config& file_cfg, CLI::App* cmd) {
    CorrelationDecayOptions opt;
    std::string hname = cmd->get_option("--h")->as<std::string>();
    std::string gname = cmd->get_option("--g")->as<std::string>();
    opt.nu = cmd->get_option("--nu")->as<double>();
    opt.kappa = cmd->get_option("--kappa")->as<double>();
    opt.n_max = cmd->get_option("--t-max")->as<int>();
    opt.realizations = cmd->get_option("--realizations")->as<int>();
    opt.corr.quad_n = cmd->get_option("--quad-n")->as<int>();
    opt.corr.mc_samples = cmd->get_option("--mc-samples")->as<int>();
    fill(cmd->get_option("--nu"), file_cfg, "flow.nu", opt.nu);
    opt.seed = g.seed;
    opt.threads = g.threads;

    const auto result = correlation_decay_experiment(scalar_preset(hname), scalar_preset(gname),
                                                     opt);
    const fs::path dir = ensure_out(g);
    CsvWriter csv({"n", "realization", "correlation"});
    for (int r = 0; r < opt.realizations; ++r) {
        for (int n = 0; n <= opt.n_max; ++n) {
            csv.add_row({static_cast<double>(n), static_cast<double>(r),
                         result.series[static_cast<std::size_t>(r)][static_cast<std::size_t>(n)]});
        }
    }
    csv.save(dir / "correlations.csv");
    json report;
    report["gamma_mean"] = result.gamma_mean;
    report["exceedance_fraction"] = result.exceedance_fraction;
    for (const auto& f : result.fits) report["fits"].push_back(fit_to_json(f));
    std::cout << report.dump(2) << "\n";
    Config meta_cfg = file_cfg;
    meta_cfg.set("correlate.h", hname);
    meta_cfg.set("correlate.g", gname);
    meta_cfg.set("flow.nu", std::to_string(opt.nu));
    write_meta(dir, meta_cfg, {g.seed}, g.threads);
    return 0;
}

int cmd_verify(const GlobalOpts& g, CLI::App* cmd) {
    const std::string suite = cmd->get_option("--suite")->as<std::string>();
    json report;
    if (suite == "identities") {
        const int n = cmd->get_option("--n")->as<int>();
        const int fields = cmd->get_option("--fields")->as<int>();
        const IdentityReport r = run_identity_suite(n, fields, 3, g.seed, g.threads);
        report = {{"fields", r.fields},
                  {"defining_c1", r.defining_c1},
                  {"div_c1", r.div_c1},
                  {"lap_c1", r.lap_c1},
                  {"lap_c2_diag", r.lap_c2_diag},
                  {"lap_c3_minus3", r.lap_c3_minus3},
                  {"lap_c3_minus5", r.lap_c3_minus5},
                  {"lap_c3_rayleigh", r.lap_c3_rayleigh},
                  {"s1_from_c1", r.s1_from_c1},
                  {"c1_from_s1", r.c1_from_s1},
                  {"commute_c1s1", r.commute_c1s1},
                  {"pythagoras_m1", r.pythagoras_m1},
                  {"r2_residual", r.r2_residual},
                  {"q2_residual", r.q2_residual},
                  {"skew_ugrad", r.skew_ugrad},
                  {"l1_min_margin", r.l1_min_margin},
                  {"l1_scale", r.l1_scale},
                  {"r3_ratio", r.r3_ratio},
                  {"c4_ratio", r.c4_ratio}};
    } else if (suite == "hardy") {
        const int n = cmd->get_option("--n")->as<int>();
        const auto r1 = hardy_poincare_1d(n);
        const auto r1b = hardy_poincare_1d(2 * n);
        const auto r2 = hardy_poincare_2d(n, 100, g.seed);
        const auto r2b = hardy_poincare_2d(2 * n, 100, g.seed);
        report = {{"poincare_unweighted", r1.unweighted_constant},
                  {"hardy_weighted", r1.weighted_constant},
                  {"hardy_weighted_refined", r1b.weighted_constant},
                  {"floor_2d", r2.min_ratio},
                  {"floor_2d_refined", r2b.min_ratio},
                  {"const_ratio_2d", r2.const_field_ratio}};
    } else if (suite == "ratios") {
        const int n = cmd->get_option("--n")->as<int>();
        const int samples = cmd->get_option("--fields")->as<int>();
        const CoefficientSet coeffs = CoefficientSet::moderate();
        const RatioBracket rb = phi_h1_ratio_bracket(n, samples, 2, coeffs, g.seed);
        const PhiPsiRatio pr = psi_controls_phi_ratio(n, samples, 2, coeffs, g.seed);
        report = {{"phi_h1_min", rb.min_ratio},
                  {"phi_h1_max", rb.max_ratio},
                  {"phi_psi_max", pr.max_ratio},
                  {"phi_psi_violation", pr.violation},
                  {"samples", samples}};
    } else if (suite == "coeffs") {
        const auto check = check_exponent_system(ExponentAssignment::paper());
        report = {{"pass", check.pass},
                  {"violated", check.violated},
                  {"tight", check.tight},
                  {"tight_coupling", check.tight_coupling}};
    } else {
        throw MixlabError("unknown suite: " + suite);
    }
    std::cout << report.dump(2) << "\n";
    return 0;
}

int cmd_coeffs(CLI::App* cmd) {
    json report;
    std::vector<long long> values;
    if (cmd->get_option("--values")->count() > 0) {
        values = cmd->get_option("--values")->as<std::vector<long long>>();
    }
    ExponentAssignment a = ExponentAssignment::paper();
    if (!values.empty()) {
        if (values.size() != 9) {
            throw MixlabError("--values needs 9 integers: x0 x1 x2 x3 y0 y1 y2 z1 z2");
        }
        std::array<long long, 9> arr;
        std::copy(values.begin(), values.end(), arr.begin());
        a = ExponentAssignment::from_array(arr);
    }
    const auto check = check_exponent_system(a);
    report["assignment"] = a.as_array();
    report["pass"] = check.pass;
    report["violated"] = check.violated;
    report["tight"] = check.tight;
    report["tight_coupling"] = check.tight_coupling;

    const std::string minimize = cmd->get_option("--minimize")->as<std::string>();
    if (!minimize.empty()) {
        const auto obj =
            minimize == "max" ? ExponentObjective::max_exponent : ExponentObjective::sum;
        const MinimizeResult m = minimize_exponents(obj);
        report["minimized"] = {{"assignment", m.assignment.as_array()},
                               {"objective", m.objective},
                               {"verified", m.verified},
                               {"lp_value", m.lp_value}};
    }
    std::cout << report.dump(2) << "\n";
    return 0;
}

int cmd_sweep(const GlobalOpts& g, const Config& file_cfg, CLI::App* cmd) {
    SweepOptions opt;
    opt.kappas = cmd->get_option("--kappas")->as<std::vector<double>>();
    opt.nu = cmd->get_option("--nu")->as<double>();
    opt.realizations = cmd->get_option("--realizations")->as<int>();
    opt.n = cmd->get_option("--n")->as<int>();
    opt.lambda_hat = cmd->get_option("--lambda-hat")->as<double>();
    fill(cmd->get_option("--nu"), file_cfg, "flow.nu", opt.nu);
    opt.seed = g.seed;
    opt.threads = g.threads;

    const SweepResult r = dissipation_sweep(opt);
    const fs::path dir = ensure_out(g);
    CsvWriter csv({"kappa", "mu_hat", "mu_log", "late_rate", "mu_stddev"});
    for (const auto& p : r.points) {
        csv.add_row({p.kappa, p.mu_hat, p.mu_log, p.late_rate, p.mu_stddev});
    }
    csv.save(dir / "sweep.csv");
    json report;
    report["lambda_hat"] = r.lambda_hat;
    for (const auto& p : r.points) {
        report["points"].push_back({{"kappa", p.kappa},
                                    {"mu_hat", p.mu_hat},
                                    {"mu_log", p.mu_log},
                                    {"late_rate", p.late_rate}});
    }
    std::cout << report.dump(2) << "\n";
    Config meta_cfg = file_cfg;
    meta_cfg.set("flow.nu", std::to_string(opt.nu));
    write_meta(dir, meta_cfg, {g.seed}, g.threads);
    return 0;
}

int cmd_fit(CLI::App* cmd) {
    const std::string path = cmd->get_option("--in")->as<std::string>();
    const std::string column = cmd->get_option("--column")->as<std::string>();
    const double t0 = cmd->get_option("--t0")->as<double>();
    const double t1 = cmd->get_option("--t1")->as<double>();

    std::ifstream is(path);
    if (!is) throw MixlabError("cannot open " + path);
    std::string line;
    std::getline(is, line);
    std::vector<std::string> cols;
    {
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) cols.push_back(tok);
    }
    const auto it = std::find(cols.begin(), cols.end(), column);
    if (it == cols.end()) throw MixlabError("column " + column + " not in " + path);
    const auto ci = static_cast<std::size_t>(it - cols.begin());
    std::vector<double> t, v;
    while (std::getline(is, line)) {
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> row;
        while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
        if (row.size() != cols.size()) continue;
        t.push_back(row[0]);
        v.push_back(row[ci]);
    }
    const DecayFit f = fit_decay(t, v, t0, t1, column);
    std::cout << fit_to_json(f).dump(2) << "\n";
    return 0;
}

int cmd_spectrum(const GlobalOpts& g, CLI::App* cmd) {
    BatchelorOptions opt;
    opt.n = cmd->get_option("--n")->as<int>();
    opt.kappa = cmd->get_option("--kappa")->as<double>();
    opt.t_final = cmd->get_option("--t-final")->as<double>();
    opt.nu = cmd->get_option("--nu")->as<double>();
    opt.annulus_width = cmd->get_option("--annulus-width")->as<int>();
    opt.seed = g.seed;

    const BatchelorResult r = batchelor_spectrum(opt);
    const fs::path dir = ensure_out(g);
    CsvWriter csv({"r", "energy"});
    for (std::size_t i = 0; i < r.r.size(); ++i) csv.add_row({r.r[i], r.energy[i]});
    csv.save(dir / "spectrum.csv");
    std::cout << json{{"loglog_slope", r.loglog_slope}}.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for passive-scalar mixing by random cellular flows"};
    app.require_subcommand(1);

    GlobalOpts g;
    app.add_option("--config", g.config_path, "flat key=value configuration file");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_option("--seed", g.seed, "base seed (realizations split from it)");
    app.add_option("--threads", g.threads, "worker threads for ensembles");

    auto* sim = app.add_subcommand("simulate", "advect a passive scalar and record mix-norms");
    sim->add_option("--n", "grid points per dimension")->default_val(256);
    sim->add_option("--kappa", "diffusivity (inverse Peclet)")->default_val(0.0);
    sim->add_option("--dt", "time step")->default_val(1e-3);
    sim->add_option("--t-final", "horizon")->default_val(10.0);
    sim->add_option("--nu", "shift diffusivity")->default_val(4.0);
    sim->add_option("--flow", "steady_cellular|random_cellular|tilted_cellular|zero")
        ->default_val("random_cellular");
    sim->add_option("--theta0", "sine|disk|random_bandlimited")->default_val("sine");
    sim->add_option("--kmax", "band limit for random theta0")->default_val(8);
    sim->add_option("--record-every", "steps between records")->default_val(100);
    sim->add_option("--realizations", "independent shift realizations")->default_val(1);
    sim->add_option("--snapshot-every", "MXC1 snapshot cadence in records (0 = off)")
        ->default_val(0);

    auto* tp = app.add_subcommand("two-point", "integrate the tilted two-point equation");
    tp->add_option("--n", "grid points per dimension (even, <= 16)")->default_val(12);
    tp->add_option("--nu", "shift diffusivity")->default_val(4.0);
    tp->add_option("--kappa", "scalar diffusivity (kappa_tilde = kappa/4)")->default_val(0.0);
    tp->add_option("--t-final", "horizon")->default_val(5.0);
    tp->add_option("--dt", "time step")->default_val(0.05);
    tp->add_option("--record-every", "steps between records")->default_val(5);
    tp->add_option("--preset", "coefficient preset: moderate|paper")->default_val("moderate");
    tp->add_flag("--snapshots", "write MXC1 snapshots of the 6D field");

    auto* corr = app.add_subcommand("correlate", "Monte-Carlo correlation decay");
    corr->add_option("--h", "observable preset")->default_val("sin_x1");
    corr->add_option("--g", "test function preset")->default_val("sin_x1");
    corr->add_option("--nu", "shift diffusivity")->default_val(4.0);
    corr->add_option("--kappa", "particle diffusivity")->default_val(0.0);
    corr->add_option("--t-max", "largest integer time")->default_val(20);
    corr->add_option("--realizations", "shift realizations")->default_val(4);
    corr->add_option("--quad-n", "quadrature nodes per dimension")->default_val(64);
    corr->add_option("--mc-samples", "kappa-noise samples per node")->default_val(1);

    auto* ver = app.add_subcommand("verify", "verification suites with JSON reports");
    ver->add_option("--suite", "identities|hardy|ratios|coeffs")->required();
    ver->add_option("--n", "grid resolution")->default_val(12);
    ver->add_option("--fields", "number of random fields / samples")->default_val(20);

    auto* co = app.add_subcommand("coeffs", "check or optimize the exponent system");
    co->add_option("--values", "nine integers x0 x1 x2 x3 y0 y1 y2 z1 z2")->expected(9);
    co->add_option("--minimize", "objective: max|sum")->default_val("");

    auto* sw = app.add_subcommand("sweep-kappa", "enhanced-dissipation sweep");
    sw->add_option("--kappas", "diffusivities, strictly decreasing")
        ->delimiter(',')
        ->default_val(std::vector<double>{1e-3, 3e-4, 1e-4});
    sw->add_option("--nu", "shift diffusivity")->default_val(4.0);
    sw->add_option("--realizations", "realizations per kappa")->default_val(4);
    sw->add_option("--n", "grid points per dimension")->default_val(256);
    sw->add_option("--lambda-hat", "mixing rate for the window (0 = estimate)")
        ->default_val(0.0);

    auto* fit = app.add_subcommand("fit", "exponential fit of a CSV column");
    fit->add_option("--in", "input CSV (first column is time)")->required();
    fit->add_option("--column", "column to fit")->default_val("h_minus1");
    fit->add_option("--t0", "window start")->default_val(-1.0);
    fit->add_option("--t1", "window end")->default_val(-1.0);

    auto* sp = app.add_subcommand("spectrum", "forced run with annulus-summed spectrum");
    sp->add_option("--n", "grid points per dimension")->default_val(256);
    sp->add_option("--kappa", "diffusivity")->default_val(1e-4);
    sp->add_option("--t-final", "horizon")->default_val(20.0);
    sp->add_option("--nu", "shift diffusivity")->default_val(4.0);
    sp->add_option("--annulus-width", "annulus width h")->default_val(1);

    CLI11_PARSE(app, argc, argv);

    try {
        const Config file_cfg = load_config(g);
        if (sim->parsed()) return cmd_simulate(g, file_cfg, sim);
        if (tp->parsed()) return cmd_two_point(g, file_cfg, tp);
        if (corr->parsed()) return cmd_correlate(g, file_cfg, corr);
        if (ver->parsed()) return cmd_verify(g, ver);
        if (co->parsed()) return cmd_coeffs(co);
        if (sw->parsed()) return cmd_sweep(g, file_cfg, sw);
        if (fit->parsed()) return cmd_fit(fit);
        if (sp->parsed()) return cmd_spectrum(g, sp);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
