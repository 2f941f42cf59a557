// momo_sim: run mobility simulations, measure traces, sweep parameters,
// run the distributed-MIMO relay experiment and export ns-2 movement files.

#include "momo/momo.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config;
    std::string out;
    std::string trace;
    std::string grid;
    std::string plot_data;
    std::optional<std::uint64_t> seed;
};

void ensure_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw momo::FormatError("cannot create directory " + dir);
}

int cmd_simulate(const Options& o)
{
    auto cfg = momo::load_experiment_config(o.config);
    if (o.seed)
        cfg.seed = *o.seed;
    momo::Trace trace = momo::run(cfg);
    momo::write_trace_file(o.out, trace);
    std::cout << "nodes=" << cfg.node_count() << '\n'
              << "duration_s=" << momo::format_g9(cfg.duration_s) << '\n'
              << "records=" << trace.records.size() << '\n';
    return 0;
}

int cmd_metrics(const Options& o)
{
    momo::Trace trace = momo::read_trace_file(o.trace);
    momo::KinematicLimits limits{5.0, 0.001, 5.0, momo::kPi / 2.0};
    // A reflecting border measures plain coordinate differences.
    momo::Playground geometry{1.0, 1.0, momo::BoundaryPolicy::reflect};
    std::vector<momo::GroupSpec> groups;
    if (!o.config.empty()) {
        auto cfg = momo::load_experiment_config(o.config);
        limits = cfg.limits;
        geometry = cfg.playground;
        groups = cfg.group_specs();
    }
    momo::MetricOptions opts;
    opts.significant_digits = 9;
    auto rep = momo::analyze_trace(trace, limits, geometry, groups, opts);

    if (o.out.empty())
        momo::write_report(std::cout, rep);
    else
        momo::write_atomic(o.out, [&](std::ostream& os) { momo::write_report(os, rep); });

    if (!o.plot_data.empty()) {
        ensure_dir(o.plot_data);
        fs::path dir(o.plot_data);
        momo::write_atomic(dir / "speed.dat", [&](std::ostream& os) { momo::write_columns(os, rep.speed_series); });
        if (rep.distances) {
            momo::write_atomic(dir / "distance_intra.dat",
                               [&](std::ostream& os) { momo::write_columns(os, rep.intra_series); });
            momo::write_atomic(dir / "distance_overall.dat",
                               [&](std::ostream& os) { momo::write_columns(os, rep.overall_series); });
        }
    }
    return 0;
}

int cmd_sweep(const Options& o)
{
    auto cfg = momo::load_experiment_config(o.config);
    if (o.seed)
        cfg.seed = *o.seed;
    momo::GridDocument grid;
    if (!o.grid.empty())
        grid = momo::parse_grid(o.grid);
    auto rows = momo::sweep(cfg, grid.grid, grid.replicas);
    if (o.out.empty())
        momo::write_sweep_table(std::cout, rows);
    else
        momo::write_atomic(o.out, [&](std::ostream& os) { momo::write_sweep_table(os, rows); });
    return 0;
}

int cmd_dmimo(const Options& o)
{
    momo::DmimoDocument doc;
    if (!o.config.empty())
        doc = momo::parse_dmimo_document(momo::parse_json_text(momo::read_file(o.config), o.config));
    if (o.seed)
        doc.scenario.seed = *o.seed;
    doc.scenario.validate();
    ensure_dir(o.out);
    fs::path dir(o.out);

    auto results = momo::run_dmimo_suite(doc.scenario, doc.speeds);
    auto speed_tag = [](double v) { return "v" + momo::format_g9(v); };
    for (const auto& r : results) {
        std::string stem = momo::to_string(r.flavor) + "_" + speed_tag(r.v_max_mps);
        std::vector<std::pair<double, double>> surv, rate;
        for (std::size_t i = 0; i < r.curve.t_el_s.size(); ++i) {
            surv.emplace_back(r.curve.t_el_s[i], r.curve.survivors_mean[i]);
            rate.emplace_back(r.curve.t_el_s[i], r.curve.rate_mean[i]);
        }
        momo::write_atomic(dir / ("survivors_" + stem + ".dat"), [&](std::ostream& os) { momo::write_columns(os, surv); });
        momo::write_atomic(dir / ("rate_" + stem + ".dat"), [&](std::ostream& os) { momo::write_columns(os, rate); });
        if (r.v_max_mps == doc.speeds.front())
            momo::write_atomic(dir / ("density_" + momo::to_string(r.flavor) + ".dat"),
                               [&](std::ostream& os) { momo::write_density_grid(os, r.histogram); });
        std::cout << stem << " survivors_at_0=" << momo::format_g9(r.curve.survivors_mean.front())
                  << " survivors_at_end=" << momo::format_g9(r.curve.survivors_mean.back())
                  << " rate_at_0=" << momo::format_g9(r.curve.rate_mean.front()) << '\n';
    }
    std::cout << "expected_random_overlap="
              << momo::format_g9(momo::expected_random_overlap(doc.scenario.l_relays, doc.scenario.k_candidates))
              << '\n';
    return 0;
}

int cmd_export_ns2(const Options& o)
{
    momo::Trace trace = momo::read_trace_file(o.trace);
    momo::write_atomic(o.out, [&](std::ostream& os) { momo::export_ns2(os, trace); });
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Mobility model simulator and measurement harness"};
    app.require_subcommand(1);
    Options o;
    std::uint64_t seed = 0;

    auto* sim = app.add_subcommand("simulate", "Run a configuration and write its trace");
    sim->add_option("--config", o.config, "Experiment configuration (JSON)")->required();
    sim->add_option("--out", o.out, "Trace file to write")->required();
    sim->add_option("--seed", seed, "Override the configured seed");

    auto* met = app.add_subcommand("metrics", "Measure a trace file");
    met->add_option("--trace", o.trace, "Trace file")->required();
    met->add_option("--config", o.config, "Configuration giving limits, area and groups");
    met->add_option("--out", o.out, "Report file (default: standard output)");
    met->add_option("--plot-data", o.plot_data, "Directory for two-column curve files");

    auto* swp = app.add_subcommand("sweep", "Tabulate metrics over a parameter grid");
    swp->add_option("--config", o.config, "Experiment configuration (JSON)")->required();
    swp->add_option("--grid", o.grid, "e.g. delta_t_s=0.1,1,5;distance_m=15,30;replicas=5");
    swp->add_option("--out", o.out, "Table file (default: standard output)");
    swp->add_option("--seed", seed, "Override the configured seed");

    auto* dm = app.add_subcommand("dmimo", "Relay-selection experiment for all flavors and speeds");
    dm->add_option("--config", o.config, "Scenario document (JSON); defaults apply when omitted");
    dm->add_option("--out", o.out, "Output directory")->required();
    dm->add_option("--seed", seed, "Override the scenario seed");

    auto* ns2 = app.add_subcommand("export-ns2", "Convert a trace into an ns-2 movement file");
    ns2->add_option("--trace", o.trace, "Trace file")->required();
    ns2->add_option("--out", o.out, "Movement file to write")->required();

    CLI11_PARSE(app, argc, argv);
    for (auto* sc : {sim, swp, dm})
        if (sc->parsed() && sc->count("--seed"))
            o.seed = seed;

    try {
        if (sim->parsed())
            return cmd_simulate(o);
        if (met->parsed())
            return cmd_metrics(o);
        if (swp->parsed())
            return cmd_sweep(o);
        if (dm->parsed())
            return cmd_dmimo(o);
        return cmd_export_ns2(o);
    } catch (const momo::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
