// Command-line front end: scenario generation, link budgets, current-field
// sampling, fixed schemes, the exhaustive oracle, training and the
// experiment runner. All outputs are CSV with LF endings.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mtuc/acoustics.hpp"
#include "mtuc/baselines.hpp"
#include "mtuc/economics.hpp"
#include "mtuc/experiments.hpp"
#include "mtuc/ocean.hpp"
#include "mtuc/routing.hpp"
#include "mtuc/scenario.hpp"
#include "mtuc/trainer.hpp"

namespace {

using namespace mtuc;

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

int cmd_gen(int k, int m, int devices, double area, int vortices, uint64_t seed,
            const std::string& out) {
    GenSpec spec;
    spec.num_groups = k;
    spec.num_auvs = m;
    spec.total_devices = devices;
    spec.area_extent_m = area;
    spec.num_vortices = vortices;
    spec.seed = seed;
    const Scenario s = generate_random(spec);
    save_scenario(out, s);
    std::printf("wrote %s (%d groups, %d devices, hash %s)\n", out.c_str(), s.num_groups(),
                s.total_devices(), scenario_hash(s).c_str());
    return 0;
}

int cmd_linkbudget(double f_khz, double dist, double shipping, double wind,
                   const std::string& out) {
    Geometry g;
    Constants c;
    c.freq_khz = f_khz;
    c.shipping = shipping;
    c.wind_ms = wind;
    const NoiseBreakdown n = noise_psd(f_khz, shipping, wind);
    const Vec3 device{0.0, 0.0, g.device_height};
    const Vec3 auv{dist, 0.0, g.auv_height};
    const LinkGeometry link = link_geometry_device_auv(device, auv, g);
    const double snr_da = snr_lb_device_auv(link, n, c);
    const double snr_as = snr_lb_auv_station(auv, g, n, c);

    std::ostringstream csv;
    csv.precision(10);
    csv << "quantity,value\n";
    csv << "noise_turbulence_db," << linear_to_db(n.turbulence) << "\n";
    csv << "noise_shipping_db," << linear_to_db(n.shipping) << "\n";
    csv << "noise_waves_db," << linear_to_db(n.waves) << "\n";
    csv << "noise_thermal_db," << linear_to_db(n.thermal) << "\n";
    csv << "noise_combined_db," << linear_to_db(n.combined) << "\n";
    csv << "absorption_db_per_km," << absorption_db_per_km(f_khz) << "\n";
    csv << "los_m," << link.los_m << "\n";
    csv << "nlos_surface_m," << link.nlos_surface_m << "\n";
    csv << "nlos_bottom_m," << link.nlos_bottom_m << "\n";
    csv << "snr_lb_device_auv," << snr_da << "\n";
    csv << "snr_lb_auv_station," << snr_as << "\n";
    for (double r : {0.25, 0.5, 1.0})
        csv << "rate_device_auv_bps_r" << r << "," << rate_device_to_auv(r, snr_da, c, g) << "\n";
    csv << "rate_auv_station_bps," << rate_auv_to_station(snr_as, c, g) << "\n";
    if (out.empty())
        std::cout << csv.str();
    else
        write_file(out, csv.str());
    return 0;
}

int cmd_field(const std::string& scenario_path, int grid, const std::string& out) {
    const Scenario s = load_scenario(scenario_path);
    const FlowField field(s);
    double extent = 100.0;
    for (const auto& g : s.groups)
        extent = std::max({extent, std::abs(g.centroid.x), std::abs(g.centroid.y)});
    for (const auto& v : s.vortices)
        extent = std::max({extent, std::abs(v.center.x) + v.radius, std::abs(v.center.y) + v.radius});
    extent *= 1.1;
    std::ostringstream csv;
    csv.precision(8);
    csv << "x,y,vx,vy,vz,speed\n";
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            const double x = -extent + 2.0 * extent * i / (grid - 1);
            const double y = -extent + 2.0 * extent * j / (grid - 1);
            const Vec3 v = current_velocity(field, {x, y, s.geometry.auv_height});
            csv << x << "," << y << "," << v.x << "," << v.y << "," << v.z << "," << v.norm()
                << "\n";
        }
    }
    write_file(out, csv.str());
    std::printf("wrote %s (%dx%d samples)\n", out.c_str(), grid, grid);
    return 0;
}

int cmd_baseline(const std::string& scenario_path, const std::string& offload,
                 const std::string& cache, const std::string& alloc, const std::string& route,
                 double proportion, uint64_t seed, const std::string& out,
                 const std::string& route_out) {
    const Scenario s = load_scenario(scenario_path);
    SchemeSpec spec;
    spec.offload = offload_mode_from(offload);
    spec.cache = cache_mode_from(cache);
    spec.alloc = alloc_mode_from(alloc);
    spec.route = route_mode_from(route);
    spec.offload_p = proportion;
    spec.cache_p = proportion;
    const DecisionSet d = scheme_decisions(s, spec, seed);
    const ProfitBreakdown pb = evaluate(s, d);
    const std::string algo = offload + "-offload/" + cache + "-cache/" + alloc + "/" + route;
    std::ostringstream csv;
    csv << ProfitBreakdown::csv_header() << "\n"
        << pb.csv_row(scenario_hash(s), algo, seed) << "\n";
    if (out.empty())
        std::cout << csv.str();
    else
        write_file(out, csv.str());
    if (!route_out.empty()) write_file(route_out, route_plan_csv(d.plan, s));
    return 0;
}

int cmd_oracle(const std::string& scenario_path, double grid, const std::string& out) {
    const Scenario s = load_scenario(scenario_path);
    const OracleResult best = oracle(s, grid);
    std::ostringstream csv;
    csv.precision(12);
    csv << "scenario_id,grid_step,profit,nodes_searched,wall_time_s\n";
    csv << scenario_hash(s) << "," << grid << "," << best.best_profit << ","
        << best.nodes_searched << "," << best.wall_time_s << "\n";
    if (out.empty())
        std::cout << csv.str();
    else
        write_file(out, csv.str());
    std::printf("oracle profit %.6f (%ld nodes, %.2f s)\n", best.best_profit,
                best.nodes_searched, best.wall_time_s);
    return 0;
}

int cmd_train(const std::string& scenario_path, long steps, int workers, uint64_t seed,
              bool adaptive, const std::string& out, const std::string& checkpoint) {
    const Scenario s = load_scenario(scenario_path);
    TrainConfig cfg;
    cfg.max_env_steps = steps;
    cfg.workers = workers;
    cfg.seed = seed;
    cfg.adaptive_lr = adaptive;
    const TrainResult r = train(s, cfg);
    if (!out.empty()) write_file(out, curve_csv(r.curve));
    if (!checkpoint.empty()) r.net.save_checkpoint(checkpoint);
    std::printf("trained %ld updates, greedy profit %.6f\n",
                static_cast<long>(r.curve.size()), greedy_profit(s, r.net));
    return 0;
}

int cmd_experiment(const std::string& id, int seeds, const std::string& out, bool full_scale) {
    ExperimentSpec spec;
    spec.id = id;
    spec.seeds = seeds;
    spec.out_dir = out;
    spec.full_scale = full_scale;
    const ExperimentOutcome outcome = run_experiment(spec);
    for (const auto& f : outcome.csv_files) std::printf("wrote %s\n", f.c_str());
    std::printf("manifest %s\n", outcome.manifest_file.c_str());
    if (!outcome.ok) {
        for (const auto& f : outcome.failures) std::fprintf(stderr, "failed: %s\n", f.c_str());
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-tier underwater computing simulator"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "generate a random scenario file");
    int k = 15, m = 4, devices = 190, vortices = 0;
    double area = 2000.0;
    uint64_t seed = 42;
    std::string out = "scenario.json";
    gen->add_option("--k", k, "number of device groups");
    gen->add_option("--m", m, "number of AUVs");
    gen->add_option("--devices", devices, "total number of devices");
    gen->add_option("--area", area, "deployment square side, meters");
    gen->add_option("--vortices", vortices, "number of random vortices");
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--out", out, "output scenario path");

    auto* lb = app.add_subcommand("linkbudget", "print noise, SNR and rate table");
    double f_khz = 30.0, dist = 500.0, shipping = 0.5, wind = 0.0;
    std::string lb_out;
    lb->add_option("--f", f_khz, "frequency, kHz");
    lb->add_option("--dist", dist, "horizontal device-AUV distance, m");
    lb->add_option("--s", shipping, "shipping activity in [0,1]");
    lb->add_option("--w", wind, "wind speed, m/s");
    lb->add_option("--out", lb_out, "output CSV (stdout when omitted)");

    auto* field = app.add_subcommand("field", "sample the current field on a grid");
    std::string field_scenario, field_out = "field.csv";
    int grid = 50;
    field->add_option("--scenario", field_scenario, "scenario file")->required();
    field->add_option("--grid", grid, "samples per axis");
    field->add_option("--out", field_out, "output CSV");

    auto* base = app.add_subcommand("baseline", "evaluate a fixed scheme");
    std::string base_scenario, offload = "full", cache = "full", alloc = "equal",
                route = "nearest", base_out, route_out;
    double proportion = 0.5;
    uint64_t base_seed = 1;
    base->add_option("--scenario", base_scenario, "scenario file")->required();
    base->add_option("--offload", offload, "full|none|random|partial");
    base->add_option("--cache", cache, "full|none|random|partial");
    base->add_option("--alloc", alloc, "equal|opt-bandwidth|opt-compute|opt-joint");
    base->add_option("--route", route, "nearest|random|agnostic|aware");
    base->add_option("--p", proportion, "probability/proportion for random and partial modes");
    base->add_option("--seed", base_seed, "scheme seed");
    base->add_option("--out", base_out, "output CSV (stdout when omitted)");
    base->add_option("--route-out", route_out, "also dump the route plan CSV");

    auto* orc = app.add_subcommand("oracle", "exhaustive search on a tiny instance");
    std::string orc_scenario, orc_out;
    double grid_step = 0.25;
    orc->add_option("--scenario", orc_scenario, "scenario file")->required();
    orc->add_option("--grid", grid_step, "allocation lattice step (0.25 or 0.5)");
    orc->add_option("--out", orc_out, "output CSV (stdout when omitted)");

    auto* tr = app.add_subcommand("train", "train the actor-critic on a scenario");
    std::string tr_scenario, tr_out = "curve.csv", tr_checkpoint;
    long steps = 100000;
    int workers = 4;
    uint64_t tr_seed = 1;
    bool adaptive = false;
    tr->add_option("--scenario", tr_scenario, "scenario file")->required();
    tr->add_option("--steps", steps, "global environment-step budget");
    tr->add_option("--workers", workers, "asynchronous workers");
    tr->add_option("--seed", tr_seed, "training seed");
    tr->add_flag("--adaptive-lr", adaptive, "decay the learning rate on profit stalls");
    tr->add_option("--out", tr_out, "learning-curve CSV");
    tr->add_option("--checkpoint", tr_checkpoint, "save the trained parameter vector");

    auto* exp = app.add_subcommand("experiment", "run a study and emit plot-ready CSVs");
    std::string exp_id, exp_out = "results";
    int exp_seeds = 5;
    bool full_scale = false;
    std::string id_help = "one of:";
    for (const auto& known : mtuc::known_experiments()) id_help += " " + known;
    exp->add_option("--id", exp_id, id_help)->required();
    exp->add_option("--seeds", exp_seeds, "seeds per cell");
    exp->add_option("--out", exp_out, "output directory");
    exp->add_flag("--full-scale", full_scale, "full-size sweep instead of desk scale");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(k, m, devices, area, vortices, seed, out);
        if (lb->parsed()) return cmd_linkbudget(f_khz, dist, shipping, wind, lb_out);
        if (field->parsed()) return cmd_field(field_scenario, grid, field_out);
        if (base->parsed())
            return cmd_baseline(base_scenario, offload, cache, alloc, route, proportion,
                                base_seed, base_out, route_out);
        if (orc->parsed()) return cmd_oracle(orc_scenario, grid_step, orc_out);
        if (tr->parsed())
            return cmd_train(tr_scenario, steps, workers, tr_seed, adaptive, tr_out, tr_checkpoint);
        if (exp->parsed()) return cmd_experiment(exp_id, exp_seeds, exp_out, full_scale);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
