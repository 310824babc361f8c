#include "mtuc/experiments.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "mtuc/baselines.hpp"
#include "mtuc/economics.hpp"
#include "mtuc/routing.hpp"

namespace mtuc {

namespace {

constexpr const char* kCodeVersion = "mtuc 0.1.0";
constexpr double kDeskCostAuv = 0.01;
constexpr double kDeskFairnessEps = 1e6;
constexpr long kDeskTrainSteps = 20000;

ExpRow trained_row(const Scenario& s, const std::string& algo, uint64_t seed, long steps) {
    const TrainResult r = train(s, benchmark_train_config(seed, steps));
    const DecisionSet d = greedy_decisions(s, r.net);
    const ProfitBreakdown pb = evaluate(s, d);
    ExpRow row;
    row.algo = algo;
    row.seed = seed;
    row.scenario_hash = scenario_hash(s);
    row.profit = pb.profit;
    row.revenue = pb.revenue;
    row.task_cost = pb.task_cost;
    row.movement_cost = pb.movement_cost;
    row.penalty = pb.fairness_penalty;
    return row;
}

SchemeSpec named_scheme(const std::string& algo) {
    SchemeSpec spec;
    spec.route = RouteMode::NearestNeighbor;
    if (algo == "full-offload") {
        spec.offload = OffloadMode::Full;
        spec.cache = CacheMode::FullCapped;
    } else if (algo == "no-offload") {
        spec.offload = OffloadMode::None;
        spec.cache = CacheMode::None;
    } else if (algo == "random-offload") {
        spec.offload = OffloadMode::Random;
        spec.cache = CacheMode::FullCapped;
    } else if (algo == "partial-offload") {
        spec.offload = OffloadMode::Partial;
        spec.cache = CacheMode::FullCapped;
    } else if (algo == "full-cache") {
        spec.offload = OffloadMode::Full;
        spec.cache = CacheMode::FullCapped;
    } else if (algo == "no-cache") {
        spec.offload = OffloadMode::Full;
        spec.cache = CacheMode::None;
    } else if (algo == "random-cache") {
        spec.offload = OffloadMode::Full;
        spec.cache = CacheMode::Random;
    } else if (algo == "partial-cache") {
        spec.offload = OffloadMode::Full;
        spec.cache = CacheMode::Partial;
    } else {
        throw std::invalid_argument("unknown scheme cell: " + algo);
    }
    return spec;
}

ExpRow scheme_row(const Scenario& s, const std::string& algo, uint64_t seed,
                  const SchemeSpec& spec) {
    const ProfitBreakdown pb = run_scheme(s, spec, seed);
    ExpRow row;
    row.algo = algo;
    row.seed = seed;
    row.scenario_hash = scenario_hash(s);
    row.profit = pb.profit;
    row.revenue = pb.revenue;
    row.task_cost = pb.task_cost;
    row.movement_cost = pb.movement_cost;
    row.penalty = pb.fairness_penalty;
    return row;
}

std::vector<ExpRow> oracle_gap_rows(int seeds, bool full_scale) {
    std::vector<ExpRow> rows;
    const long steps = full_scale ? 4 * kDeskTrainSteps : kDeskTrainSteps;
    for (int i = 0; i < seeds; ++i) {
        const Scenario s = tiny_benchmark_instance(i);
        const OracleResult best = oracle(s, 0.25);
        ExpRow row = trained_row(s, "a3c", static_cast<uint64_t>(i + 1), steps);
        row.sweep = i;
        row.extra = best.best_profit;
        rows.push_back(row);
    }
    return rows;
}

std::vector<ExpRow> fig7_rows(int seeds, bool /*full_scale*/) {
    std::vector<ExpRow> rows;
    for (int i = 0; i < seeds; ++i) {
        const uint64_t seed = static_cast<uint64_t>(i + 1);
        const Scenario s = desk_benchmark_scenario(3000 + seed, 6, (i % 2) + 1, 18, 1000.0, 3);
        for (const char* algo : {"aware", "agnostic"}) {
            SchemeSpec spec;
            spec.offload = OffloadMode::Full;
            spec.cache = CacheMode::FullCapped;
            spec.route = std::string(algo) == "aware" ? RouteMode::EnvAware : RouteMode::EnvAgnostic;
            rows.push_back(scheme_row(s, algo, seed, spec));
        }
    }
    return rows;
}

std::vector<ExpRow> fig8_rows(int seeds, bool full_scale) {
    std::vector<ExpRow> rows;
    const long steps = full_scale ? 3 * kDeskTrainSteps : kDeskTrainSteps;
    for (int i = 0; i < seeds; ++i) {
        const uint64_t seed = static_cast<uint64_t>(i + 1);
        const Scenario s = desk_benchmark_scenario(4000 + seed, 4, 1, 12, 600.0, 0);
        rows.push_back(trained_row(s, "proposed", seed, steps));
        for (const char* algo : {"full-offload", "no-offload", "random-offload"})
            rows.push_back(scheme_row(s, algo, seed, named_scheme(algo)));
        for (const double p : {0.25, 0.5, 0.75}) {
            SchemeSpec spec = named_scheme("partial-offload");
            spec.offload_p = p;
            ExpRow row = scheme_row(s, "partial-offload", seed, spec);
            row.sweep = static_cast<int>(std::lround(100 * p));
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<ExpRow> fig9_rows(int seeds, bool full_scale) {
    std::vector<ExpRow> rows;
    const long steps = full_scale ? 3 * kDeskTrainSteps : kDeskTrainSteps;
    for (int i = 0; i < seeds; ++i) {
        const uint64_t seed = static_cast<uint64_t>(i + 1);
        const Scenario s = desk_benchmark_scenario(5000 + seed, 4, 1, 12, 600.0, 0);
        rows.push_back(trained_row(s, "proposed", seed, steps));
        for (const char* algo : {"full-cache", "no-cache", "random-cache"})
            rows.push_back(scheme_row(s, algo, seed, named_scheme(algo)));
        for (const double p : {0.25, 0.5, 0.75}) {
            SchemeSpec spec = named_scheme("partial-cache");
            spec.cache_p = p;
            ExpRow row = scheme_row(s, "partial-cache", seed, spec);
            row.sweep = static_cast<int>(std::lround(100 * p));
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<ExpRow> fig10_rows(int seeds, bool /*full_scale*/) {
    std::vector<ExpRow> rows;
    const std::map<std::string, AllocMode> cells = {
        {"joint", AllocMode::OptJoint},
        {"opt-bandwidth", AllocMode::OptBandwidth},
        {"opt-compute", AllocMode::OptCompute},
        {"equal", AllocMode::Equal},
    };
    for (int i = 0; i < seeds; ++i) {
        const uint64_t seed = static_cast<uint64_t>(i + 1);
        const Scenario s = desk_benchmark_scenario(6000 + seed, 3, 1, 9, 500.0, 0);
        for (const auto& [name, mode] : cells) {
            SchemeSpec spec;
            spec.offload = OffloadMode::Full;
            spec.cache = CacheMode::None;  // transmissions active so bandwidth matters
            spec.alloc = mode;
            rows.push_back(scheme_row(s, name, seed, spec));
        }
    }
    return rows;
}

std::vector<ExpRow> fig6_rows(int seeds, bool full_scale) {
    std::vector<ExpRow> rows;
    const long steps = full_scale ? 3 * kDeskTrainSteps : 30000;
    for (int m = 1; m <= 6; ++m) {
        const Scenario s = clustered_benchmark_scenario(m);
        for (int i = 0; i < seeds; ++i) {
            const uint64_t seed = static_cast<uint64_t>(i + 1);
            ExpRow row = trained_row(s, "a3c", seed, steps);
            row.sweep = m;
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<ExpRow> fig12_rows(int seeds, bool full_scale) {
    std::vector<ExpRow> rows;
    const long steps = full_scale ? 3 * kDeskTrainSteps : kDeskTrainSteps;
    for (int i = 0; i < seeds; ++i) {
        const uint64_t seed = static_cast<uint64_t>(i + 1);
        const Scenario s = tiny_benchmark_instance(2);
        for (const bool adaptive : {true, false}) {
            TrainConfig cfg = benchmark_train_config(seed, steps);
            cfg.adaptive_lr = adaptive;
            const TrainResult r = train(s, cfg);
            ExpRow row;
            row.algo = adaptive ? "adaptive-lr" : "fixed-lr";
            row.seed = seed;
            row.scenario_hash = scenario_hash(s);
            row.profit = r.tail_mean_profit();
            row.extra = greedy_profit(s, r.net);
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace

const std::vector<std::string>& known_experiments() {
    static const std::vector<std::string> ids = {
        "fig7_trajectories", "fig6_profit_vs_auvs", "fig8_offload", "fig9_cache",
        "fig10_alloc",       "fig12_lr",            "oracle_gap",
    };
    return ids;
}

std::vector<ExpRow> experiment_rows(const std::string& id, int seeds, bool full_scale) {
    if (seeds < 1) throw std::invalid_argument("experiment needs at least one seed");
    if (id == "oracle_gap") return oracle_gap_rows(seeds, full_scale);
    if (id == "fig7_trajectories") return fig7_rows(seeds, full_scale);
    if (id == "fig8_offload") return fig8_rows(seeds, full_scale);
    if (id == "fig9_cache") return fig9_rows(seeds, full_scale);
    if (id == "fig10_alloc") return fig10_rows(seeds, full_scale);
    if (id == "fig6_profit_vs_auvs") return fig6_rows(seeds, full_scale);
    if (id == "fig12_lr") return fig12_rows(seeds, full_scale);
    throw std::invalid_argument("unknown experiment id: " + id);
}

ExperimentOutcome run_experiment(const ExperimentSpec& spec) {
    namespace fs = std::filesystem;
    ExperimentOutcome outcome;
    fs::create_directories(spec.out_dir);

    std::vector<ExpRow> rows;
    try {
        rows = experiment_rows(spec.id, spec.seeds, spec.full_scale);
    } catch (const std::exception& e) {
        outcome.ok = false;
        outcome.failures.push_back(spec.id + ": " + e.what());
    }

    if (outcome.ok) {
        const fs::path csv_path = fs::path(spec.out_dir) / (spec.id + ".csv");
        std::ofstream csv(csv_path, std::ios::binary);
        csv.precision(12);
        csv << "algo,sweep,seed,scenario_hash,revenue,task_cost,movement_cost,penalty,profit,extra\n";
        for (const auto& r : rows)
            csv << r.algo << "," << r.sweep << "," << r.seed << "," << r.scenario_hash << ","
                << r.revenue << "," << r.task_cost << "," << r.movement_cost << "," << r.penalty
                << "," << r.profit << "," << r.extra << "\n";
        outcome.csv_files.push_back(csv_path.string());
    }

    nlohmann::ordered_json manifest;
    manifest["experiment"] = spec.id;
    manifest["seeds"] = spec.seeds;
    manifest["full_scale"] = spec.full_scale;
    manifest["code_version"] = kCodeVersion;
    manifest["csv_files"] = outcome.csv_files;
    manifest["failures"] = outcome.failures;
    const fs::path manifest_path =
        fs::path(spec.out_dir) / (spec.id + "_manifest.json");
    std::ofstream(manifest_path, std::ios::binary) << manifest.dump(2) << "\n";
    outcome.manifest_file = manifest_path.string();
    return outcome;
}

Scenario tiny_benchmark_instance(int index) {
    GenSpec spec;
    spec.num_groups = 4;
    spec.num_auvs = index < 2 ? 2 : 1;
    spec.total_devices = 8;
    spec.area_extent_m = 500.0;
    spec.seed = static_cast<uint64_t>(1001 + index);
    Scenario s = generate_random(spec);
    s.constants.cost_auv = kDeskCostAuv;
    s.constants.fairness_eps_s = kDeskFairnessEps;
    return s;
}

Scenario desk_benchmark_scenario(uint64_t seed, int groups, int auvs, int total_devices,
                                 double extent_m, int vortices) {
    GenSpec spec;
    spec.num_groups = groups;
    spec.num_auvs = auvs;
    spec.total_devices = total_devices;
    spec.area_extent_m = extent_m;
    spec.num_vortices = vortices;
    spec.seed = seed;
    Scenario s = generate_random(spec);
    s.constants.cost_auv = kDeskCostAuv;
    s.constants.fairness_eps_s = kDeskFairnessEps;
    return s;
}

Scenario clustered_benchmark_scenario(int num_auvs) {
    // deterministic layout; only the device attributes come from the stream
    GenSpec spec;
    spec.num_groups = 6;
    spec.num_auvs = num_auvs;
    spec.total_devices = 60;
    spec.area_extent_m = 1600.0;
    spec.seed = 777;
    Scenario s = generate_random(spec);
    s.constants.cost_auv = kDeskCostAuv;
    s.constants.fairness_eps_s = kDeskFairnessEps;

    const double cluster_radius = 700.0;
    const double pair_offset = 40.0;
    const double pi = 3.14159265358979323846;
    std::vector<Vec3> centers;
    for (int c = 0; c < 3; ++c) {
        const double ang = pi / 2.0 + c * 2.0 * pi / 3.0;  // 90, 210, 330 degrees
        const Vec3 center{cluster_radius * std::cos(ang), cluster_radius * std::sin(ang), 0.0};
        centers.push_back(center);
        const Vec3 tangent{-std::sin(ang), std::cos(ang), 0.0};
        for (int half = 0; half < 2; ++half) {
            const int k = 2 * c + half;
            const Vec3 at = center + (half == 0 ? -pair_offset : pair_offset) * tangent;
            auto& g = s.groups[static_cast<size_t>(k)];
            const Vec3 shift = Vec3{at.x, at.y, g.centroid.z} - g.centroid;
            g.centroid += shift;
            for (auto& d : g.devices) d.pos += shift;
        }
    }
    // A compact counter-rotating pair sits on each inter-cluster chord
    // midpoint with its axis along the chord: the pair's jet crosses the
    // chord at high speed while the far field cancels, so crossings between
    // clusters are expensive in both directions but the radial corridors to
    // the station stay cheap.
    s.vortices.clear();
    const double jet_strength = 3000.0;
    const double jet_spacing = 60.0;
    const double jet_core = 70.0;
    for (int c = 0; c < 3; ++c) {
        const Vec3 m = 0.5 * (centers[static_cast<size_t>(c)] + centers[static_cast<size_t>((c + 1) % 3)]);
        Vec3 along = centers[static_cast<size_t>((c + 1) % 3)] - centers[static_cast<size_t>(c)];
        along = along / along.norm();
        const Vec3 p1 = m + jet_spacing * along;
        const Vec3 p2 = m - jet_spacing * along;
        s.vortices.push_back({{p1.x, p1.y, s.geometry.auv_height}, jet_strength, jet_core});
        s.vortices.push_back({{p2.x, p2.y, s.geometry.auv_height}, -jet_strength, jet_core});
    }
    return s;
}

TrainConfig benchmark_train_config(uint64_t seed, long max_env_steps) {
    TrainConfig cfg;
    cfg.workers = 1;
    cfg.max_env_steps = max_env_steps;
    cfg.seed = seed;
    cfg.learning_rate = 1e-3;
    cfg.entropy_weight = 0.02;
    cfg.explore_temp = 0.5;
    return cfg;
}

}  // namespace mtuc
