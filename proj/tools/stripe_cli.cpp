// Command-line driver: each subcommand computes one family of results and writes CSV/JSON
// artifacts into the output directory. Artifacts are staged in memory and committed only when
// the command succeeds.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "stripe/energy.hpp"
#include "stripe/io.hpp"
#include "stripe/parallel.hpp"
#include "stripe/pde1d.hpp"
#include "stripe/pde2d.hpp"
#include "stripe/stability.hpp"

using namespace stripe;
using nlohmann::json;

namespace {

struct Context {
    io::RunConfig cfg;
    unsigned jobs = 1;
    io::ArtifactSet out;
    std::vector<std::string> warnings;

    Params params() const {
        return Params(cfg.get_double("lambda"), cfg.get_double("a"), cfg.get_double("alpha"), cfg.get_double("R"));
    }
    ProfileOptions profile_options() const {
        ProfileOptions o;
        o.s_max = cfg.get_double("s_max");
        o.n_samples = cfg.get_size("n_samples");
        o.grid_intervals = cfg.get_size("grid_intervals");
        o.sampling.jobs = jobs;
        return o;
    }
    void warn(const std::string& w) {
        std::cerr << "warning: " << w << '\n';
        warnings.push_back(w);
    }
};

std::string kind_name(ProfileWarning::Kind k) {
    return k == ProfileWarning::Kind::tangency ? "tangency" : "negative_values";
}

json profile_json(const Profile& V, std::size_t index, bool largest) {
    return {{"index", index},
            {"s", V.s},
            {"kind", V.kind == ProfileKind::trivial ? "trivial" : "nontrivial"},
            {"center_value", V.center_value},
            {"residual", V.residual},
            {"transversality", V.transversality},
            {"parity_defect", V.parity_defect},
            {"even", V.even},
            {"largest", largest}};
}

ProfileSet profiles_with_warnings(Context& ctx, const Params& p) {
    auto set = find_profiles(p, ctx.profile_options());
    for (const auto& w : set.warnings) ctx.warn(kind_name(w.kind) + ": " + w.message);
    return set;
}

void cmd_profiles(Context& ctx) {
    const Params p = ctx.params();
    const auto opt = ctx.profile_options();
    const auto set = profiles_with_warnings(ctx, p);

    json j{{"params", to_json(p)}, {"largest", set.largest}, {"profiles", json::array()}, {"warnings", json::array()}};
    for (std::size_t i = 0; i < set.profiles.size(); ++i) {
        const auto& V = set.profiles[i];
        j["profiles"].push_back(profile_json(V, i, i == set.largest));
        io::CsvTable t({"y", "v", "w"});
        for (std::size_t n = 0; n < V.size(); ++n) t.add_row({V.y[n], V.v[n], V.w[n]});
        ctx.out.add_csv("profile_" + std::to_string(i) + ".csv", t);
    }
    for (const auto& w : set.warnings) j["warnings"].push_back({{"kind", kind_name(w.kind)}, {"s", w.s}, {"message", w.message}});
    ctx.out.add_json("profiles.json", j);

    io::CsvTable curve({"s", "v_end", "w_end", "residual", "blowup"});
    for (const auto& c : sample_image_of_line(p, opt.s_max, opt.n_samples, opt.sampling))
        curve.add_row({c.s, c.endpoint.v, c.endpoint.w, c.residual, c.blowup ? 1.0 : 0.0});
    ctx.out.add_csv("curve.csv", curve);
}

void cmd_stability(Context& ctx) {
    const Params p = ctx.params();
    const auto set = profiles_with_warnings(ctx, p);
    json j{{"params", to_json(p)}, {"profiles", json::array()}};
    for (std::size_t i = 0; i < set.profiles.size(); ++i) {
        const auto& V = set.profiles[i];
        const auto rep = analyze(V);
        if (rep.marginal) ctx.warn("profile " + std::to_string(i) + " is marginal (h(0) on a multiple of pi)");
        j["profiles"].push_back({{"index", i},
                                 {"s", V.s},
                                 {"k", rep.k},
                                 {"h0", rep.h0},
                                 {"marginal", rep.marginal},
                                 {"eigenvalues", rep.eigenvalues},
                                 {"tangent_crossings", tangent_crossing_count(V)}});
        if (rep.k >= 1 && rep.eigenvalues.front() > 0.0) {
            const auto ef = principal_eigenfunction(V, rep.eigenvalues.front());
            io::CsvTable t({"y", "phi", "dphi"});
            for (std::size_t n = 0; n < ef.y.size(); ++n) t.add_row({ef.y[n], ef.phi[n], ef.dphi[n]});
            ctx.out.add_csv("eigenfunction_" + std::to_string(i) + ".csv", t);
        }
    }
    ctx.out.add_json("stability.json", j);
}

void cmd_energy(Context& ctx) {
    const Params p = ctx.params();
    const auto opt = ctx.profile_options();
    const auto set = profiles_with_warnings(ctx, p);
    json j{{"params", to_json(p)}, {"profiles", json::array()}};
    for (std::size_t i = 0; i < set.profiles.size(); ++i) {
        const auto rep = energy_report(set.profiles[i]);
        j["profiles"].push_back({{"index", i},
                                 {"s", set.profiles[i].s},
                                 {"e_line", rep.e_line},
                                 {"e_interval", rep.e_interval},
                                 {"quadrature_error_estimate", rep.quadrature_error_estimate}});
    }
    if (set.nontrivial_count() > 0) {
        try {
            const auto d = dE_dR_identity(p, 1e-3, 1e-2, opt);
            j["dE_dR"] = {{"analytic", d.analytic}, {"finite_difference", d.finite_difference},
                          {"transversality", d.transversality}};
        } catch (const FoldTooClose& e) {
            ctx.warn(e.what());
            j["dE_dR"] = {{"skipped", e.what()}};
        }
    }
    ctx.out.add_json("energy.json", j);
}

Thresholds resolve_thresholds(Context& ctx) {
    const Params p = ctx.params();
    if (!ctx.cfg.is_auto("r0") && !ctx.cfg.is_auto("r1")) {
        Thresholds t;
        t.r0 = ctx.cfg.get_double("r0");
        t.r1 = ctx.cfg.get_double("r1");
        if (!(t.r0 < t.r1)) throw ConfigError("precomputed thresholds need r0 < r1");
        return t;
    }
    return compute_thresholds(p, ctx.cfg.get_double("width"), ctx.profile_options());
}

json thresholds_json(const Thresholds& t) {
    return {{"r0", t.r0}, {"r1", t.r1}, {"r2", t.r2}, {"r2_empty_window", t.r2_empty_window},
            {"r0_width", t.r0_width}, {"r1_width", t.r1_width}, {"r2_width", t.r2_width}, {"fold_s", t.fold_s}};
}

void cmd_thresholds(Context& ctx) {
    const Params p = ctx.params();
    const auto t = compute_thresholds(p, ctx.cfg.get_double("width"), ctx.profile_options());
    json j = thresholds_json(t);
    j["params"] = {{"lambda", p.lambda()}, {"a", p.a()}, {"alpha", p.alpha()}};
    j["beta"] = beta(p);
    j["regime"] = regime_of(p).supercritical_line ? "alpha < a lambda" : "alpha >= a lambda";
    ctx.out.add_json("thresholds.json", j);
}

std::vector<double> sweep_grid(const io::RunConfig& cfg) {
    if (!cfg.is_auto("sweep_R")) return cfg.get_list("sweep_R");
    const double lo = cfg.get_double("sweep_R_min"), hi = cfg.get_double("sweep_R_max");
    const std::size_t n = cfg.get_size("sweep_steps");
    if (n < 2 || !(hi > lo)) throw ConfigError("sweep needs sweep_steps >= 2 and sweep_R_max > sweep_R_min");
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

void cmd_sweep(Context& ctx) {
    const Params p = ctx.params();
    const auto rows = bifurcation_sweep(p, sweep_grid(ctx.cfg), ctx.jobs, ctx.profile_options());
    io::CsvTable table({"R", "profile_count", "vm_center", "e_vm", "warnings"});
    io::CsvTable per({"R", "index", "s", "center_value", "energy", "k", "marginal"});
    json j{{"params", {{"lambda", p.lambda()}, {"a", p.a()}, {"alpha", p.alpha()}}}, {"rows", json::array()}};
    for (const auto& r : rows) {
        if (!r.violations.empty()) {
            std::ostringstream os;
            os << "sweep row R = " << r.R << " breaks an invariant: " << r.violations.front();
            throw Error(os.str());
        }
        for (const auto& w : r.warnings) ctx.warn("R = " + io::format_sci(r.R) + ": " + w);
        table.add_row({r.R, static_cast<double>(r.profile_count), r.vm_center, r.e_vm, static_cast<double>(r.warnings.size())});
        json row{{"R", r.R}, {"profile_count", r.profile_count}, {"vm_center", r.vm_center}, {"e_vm", r.e_vm},
                 {"warnings", r.warnings}, {"profiles", json::array()}};
        for (std::size_t i = 0; i < r.profiles.size(); ++i) {
            const auto& s = r.profiles[i];
            per.add_row({r.R, static_cast<double>(i), s.s, s.center_value, s.energy, static_cast<double>(s.k), s.marginal ? 1.0 : 0.0});
            row["profiles"].push_back({{"s", s.s}, {"center_value", s.center_value}, {"energy", s.energy}, {"k", s.k},
                                       {"marginal", s.marginal}});
        }
        j["rows"].push_back(row);
    }
    ctx.out.add_csv("sweep.csv", table);
    ctx.out.add_csv("sweep_profiles.csv", per);
    ctx.out.add_json("sweep.json", j);
}

void cmd_sim1d(Context& ctx) {
    const Params p = ctx.params();
    const auto set = profiles_with_warnings(ctx, p);
    const std::size_t nodes = ctx.cfg.get_size("sim1d_nodes");
    const std::string init = ctx.cfg.get("sim1d_init");
    const double scale = ctx.cfg.get_double("sim1d_scale");

    Field1D u0 = make_field1d(p, nodes, [](double) { return 0.0; });
    if (init == "scaled_vm") {
        const auto& vm = set.vm();
        u0 = make_field1d(p, nodes, [&](double y) { return scale * vm.value_at(y); });
    } else if (init == "constant") {
        u0 = make_field1d(p, nodes, [&](double) { return scale; });
    } else if (init == "unstable_minus" || init == "unstable_plus") {
        const std::size_t idx = ctx.cfg.get_size("sim1d_profile");
        if (idx >= set.profiles.size()) throw ConfigError("sim1d_profile is out of range");
        const auto& V = set.profiles[idx];
        const auto rep = analyze(V);
        if (rep.k < 1 || !(rep.eigenvalues.front() > 0.0)) throw ConfigError("sim1d_profile is not an unstable profile");
        const auto phi = principal_eigenfunction(V, rep.eigenvalues.front());
        const double eps = ctx.cfg.get_double("sim1d_eps") * (init == "unstable_minus" ? -1.0 : 1.0);
        u0 = make_field1d(p, nodes, [&](double y) { return V.value_at(y) + eps * phi.value_at(y); });
    } else {
        throw ConfigError("unknown sim1d_init '" + init + "'");
    }

    Run1DOptions opt;
    opt.T = ctx.cfg.get_double("sim1d_T");
    opt.dt = ctx.cfg.get_double("sim1d_dt");
    opt.snapshot_every = ctx.cfg.get_size("sim1d_snapshot_every");
    const auto run = run1d(u0, set.profiles, opt);

    io::CsvTable energy({"t", "energy"});
    for (std::size_t n = 0; n < run.times.size(); ++n) energy.add_row({run.times[n], run.energies[n]});
    ctx.out.add_csv("energy.csv", energy);

    std::vector<std::string> cols{"t"};
    for (std::size_t i = 0; i < nodes; ++i) cols.push_back("u" + std::to_string(i));
    io::CsvTable snaps(cols);
    json times = json::array();
    for (const auto& s : run.snapshots) {
        std::vector<double> row{s.t};
        row.insert(row.end(), s.u.begin(), s.u.end());
        snaps.add_row(row);
        times.push_back(s.t);
    }
    ctx.out.add_csv("snapshots.csv", snaps);
    ctx.out.add_json("snapshots.json", {{"y_min", -p.R()}, {"dy", u0.dy}, {"nodes", nodes}, {"times", times}});

    std::string label = "none";
    if (run.limit_index == 0) label = "trivial";
    else if (run.limit_index == static_cast<int>(set.largest)) label = "largest";
    else if (run.limit_index > 0) label = "profile_" + std::to_string(run.limit_index);
    ctx.out.add_json("sim1d.json", {{"params", to_json(p)},
                                    {"init", init},
                                    {"final_t", run.final_state.t},
                                    {"limit", label},
                                    {"limit_index", run.limit_index},
                                    {"limit_distance", run.limit_distance},
                                    {"max_energy_increase", run.max_energy_increase}});
    if (run.limit_index < 0) ctx.warn("sim1d: terminal state is not within the classification radius of any profile");
}

Grid2DSpec grid_from(const io::RunConfig& cfg) {
    return {cfg.get_size("sim2d_nx"), cfg.get_size("sim2d_ny"), cfg.get_double("sim2d_Lx"), cfg.get_double("sim2d_Ly")};
}

Scheme2D scheme_from(const io::RunConfig& cfg) {
    const auto s = cfg.get("sim2d_scheme");
    if (s == "adi") return Scheme2D::adi;
    if (s == "explicit") return Scheme2D::explicit_euler;
    throw ConfigError("unknown sim2d_scheme '" + s + "'");
}

void add_matrix(io::ArtifactSet& out, const std::string& name, const Field2D& u, const std::vector<double>& values) {
    std::vector<std::string> cols;
    for (std::size_t i = 0; i < u.nx; ++i) cols.push_back("x" + std::to_string(i));
    io::CsvTable t(cols);
    for (std::size_t j = 0; j < u.ny; ++j)
        t.add_row(std::vector<double>(values.begin() + static_cast<long>(j * u.nx),
                                      values.begin() + static_cast<long>((j + 1) * u.nx)));
    out.add_csv(name, t);
}

json front_json(const FrontMeasurement& m) {
    return {{"c", m.c}, {"t_start", m.t_start}, {"t_end", m.t_end}, {"fit_residual", m.fit_residual},
            {"samples", m.samples}, {"accepted", m.accepted()}};
}

void cmd_sim2d(Context& ctx) {
    const Params p = ctx.params();
    Run2DOptions opt;
    opt.T = ctx.cfg.get_double("sim2d_T");
    opt.dt = ctx.cfg.get_double("sim2d_dt");
    opt.scheme = scheme_from(ctx.cfg);
    opt.track_every = ctx.cfg.get_size("sim2d_track_every");
    opt.snapshot_every = ctx.cfg.get_size("sim2d_snapshot_every");
    const auto run = run2d(standard_bump(p, grid_from(ctx.cfg)), opt);

    io::CsvTable front({"t", "x_star", "sup_center", "mass"});
    for (const auto& s : run.track)
        front.add_row({s.t, s.x_star ? *s.x_star : std::nan(""), s.sup_center, s.mass});
    ctx.out.add_csv("front.csv", front);

    const auto& u = run.final_state;
    json times = json::array();
    for (std::size_t k = 0; k < run.snapshots.size(); ++k) {
        add_matrix(ctx.out, "snapshot_" + std::to_string(k) + ".csv", u, run.snapshots[k].u);
        times.push_back(run.snapshots[k].t);
    }
    add_matrix(ctx.out, "final.csv", u, u.u);
    ctx.out.add_json("snapshots.json", {{"x_min", 0.0}, {"dx", u.dx}, {"nx", u.nx}, {"y_min", -u.Ly}, {"dy", u.dy},
                                        {"ny", u.ny}, {"times", times}, {"final_t", u.t}, {"rows", "y"},
                                        {"columns", "x"}});

    json j{{"params", to_json(p)}, {"final_t", u.t}, {"stopped_early", run.stopped_early}};
    try {
        const auto m = front_speed(run.track);
        j["front"] = front_json(m);
        if (!m.accepted()) ctx.warn("front speed fit residual above 5%");
    } catch (const NoInterface& e) {
        j["front"] = {{"skipped", e.what()}};
        ctx.warn(e.what());
    }
    ctx.out.add_json("sim2d.json", j);
}

void cmd_regime(Context& ctx) {
    const Params p = ctx.params();
    const auto t = resolve_thresholds(ctx);
    std::vector<double> Rs;
    if (ctx.cfg.is_auto("regime_R")) Rs = {0.8 * t.r0, 0.5 * (t.r0 + t.r1), 1.5 * t.r1};
    else Rs = ctx.cfg.get_list("regime_R");

    RegimeOptions opt;
    opt.grid = grid_from(ctx.cfg);
    opt.run.T = ctx.cfg.get_double("regime_T");
    opt.run.dt = ctx.cfg.get_double("sim2d_dt");
    opt.run.scheme = scheme_from(ctx.cfg);
    opt.run.track_every = ctx.cfg.get_size("sim2d_track_every");

    std::vector<std::optional<RegimeReport>> reports(Rs.size());
    parallel_for(Rs.size(), ctx.jobs, [&](std::size_t i) { reports[i] = classify_regime(p.with_R(Rs[i]), t.r0, t.r1, opt); });

    io::CsvTable table({"R", "label", "measured", "c", "fit_residual", "sup_center_half"});
    json j{{"thresholds", thresholds_json(t)}, {"rows", json::array()}};
    for (std::size_t i = 0; i < Rs.size(); ++i) {
        const auto& r = *reports[i];
        const double c = r.front ? r.front->c : std::nan("");
        const double fr = r.front ? r.front->fit_residual : std::nan("");
        table.add_cells({io::format_sci(Rs[i]), to_string(r.label), to_string(r.measured), io::format_sci(c),
                         io::format_sci(fr), io::format_sci(r.sup_center_half)});
        json row{{"R", Rs[i]}, {"label", to_string(r.label)}, {"measured", to_string(r.measured)},
                 {"sup_center_half", r.sup_center_half}, {"run_time", r.run_time}, {"stopped_early", r.stopped_early}};
        if (r.front) row["front"] = front_json(*r.front);
        j["rows"].push_back(row);
        if (r.label == RegimeLabel::ambiguous) ctx.warn("R = " + io::format_sci(Rs[i]) + " is ambiguous");
    }
    ctx.out.add_csv("regime.csv", table);
    ctx.out.add_json("regime.json", j);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bistable reaction-diffusion on a stripe: profiles, stability, energies, thresholds, simulations"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    unsigned jobs = 1;
    app.add_option("--config", config_path, "key = value configuration file")->check(CLI::ExistingFile);
    app.add_option("--set", overrides, "override one key (key=value), repeatable");
    app.add_option("--out", out_dir, "output directory (default: $OUT_DIR, then ./out)");
    app.add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);

    const std::map<std::string, std::pair<std::string, std::function<void(Context&)>>> commands = {
        {"profiles", {"find all profiles, write them and the shooting curve", cmd_profiles}},
        {"stability", {"nonnegative eigenvalues of every profile", cmd_stability}},
        {"energy", {"energies and the derivative identity", cmd_energy}},
        {"thresholds", {"critical thicknesses r0, r1, r2", cmd_thresholds}},
        {"sweep", {"bifurcation table over R", cmd_sweep}},
        {"sim1d", {"parabolic evolution on (-R, R)", cmd_sim1d}},
        {"sim2d", {"strip simulation from the standard bump", cmd_sim2d}},
        {"regime", {"three-regime classification in 2D", cmd_regime}},
    };
    for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    const std::string name = app.get_subcommands().front()->get_name();
    Context ctx;
    ctx.jobs = jobs;
    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            std::ostringstream os;
            os << in.rdbuf();
            ctx.cfg.merge_text(os.str(), config_path);
        }
        for (const auto& o : overrides) ctx.cfg.set(o);
        if (out_dir.empty()) {
            const char* env = std::getenv("OUT_DIR");
            out_dir = env && *env ? env : "out";
        }
        commands.at(name).second(ctx);
        ctx.out.add("config.txt", ctx.cfg.str());
        ctx.out.commit(out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return ctx.warnings.empty() ? 0 : 2;
}
