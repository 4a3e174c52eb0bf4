#pragma once
// Run orchestration: a single policy run, the paired fog-vs-cloud comparison,
// and multi-seed sweeps. Sweeps may fan out over worker threads; results are
// assembled in seed order so concurrency never changes any output byte.

#include <atomic>
#include <cstdint>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "fogstream/config.hpp"
#include "fogstream/engine.hpp"
#include "fogstream/metrics.hpp"
#include "fogstream/placement.hpp"
#include "fogstream/reports.hpp"

namespace fogstream {

struct RunResult {
    MetricsReport metrics;
    PlacementReport placement;
    RawRunLog log;
};

// One simulation of the scenario under the given policy. The seed override
// (if any) replaces the scenario's seed; workload substreams are keyed by
// sensor, so both policies see identical emissions for the same seed.
inline RunResult run_single(const Scenario& sc, const std::string& policy,
                            std::uint64_t seed, EngineOptions options = {}) {
    RunResult r;
    Placement p = place(policy, sc.app, sc.topo);
    if (options.traces == nullptr && !sc.traces.empty())
        options.traces = &sc.traces;
    r.log = simulate(sc.topo, sc.app, p, sc.sensors, sc.horizon_ms, seed, options);
    r.metrics = build_metrics(r.log, policy, sc.warmup_fraction, sc.hash);
    r.placement = placement_report(p, sc.app, sc.topo);
    return r;
}

inline RunResult run_single(const Scenario& sc, const std::string& policy,
                            EngineOptions options = {}) {
    return run_single(sc, policy, sc.seed, options);
}

inline ComparisonReport compare_policies(const Scenario& sc, std::uint64_t seed) {
    RunResult fog = run_single(sc, "edgeward", seed);
    RunResult cloud = run_single(sc, "cloud", seed);
    return compare(fog.metrics, cloud.metrics);
}

struct SweepSummary {
    std::vector<ComparisonReport> per_seed;  // in the order the seeds were given
    double mean_delay_ratio = 0.0;
    double mean_cloud_tuple_ratio = 0.0;
    std::uint64_t seeds_fog_delay_better = 0;
    std::uint64_t seeds_fog_traffic_better = 0;
};

// Both policies for every seed. jobs <= 1 runs inline; more threads split the
// seed list. Simulation instances share only immutable scenario state.
inline SweepSummary sweep(const Scenario& sc, const std::vector<std::uint64_t>& seeds,
                          unsigned jobs = 1) {
    if (seeds.empty())
        raise("ConfigError", "seed list is empty");
    SweepSummary out;
    out.per_seed.resize(seeds.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < seeds.size(); ++i)
            out.per_seed[i] = compare_policies(sc, seeds[i]);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (unsigned w = 0; w < jobs && w < seeds.size(); ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < seeds.size();
                     i = next.fetch_add(1))
                    out.per_seed[i] = compare_policies(sc, seeds[i]);
            });
        for (auto& t : pool)
            t.join();
    }
    KahanMean delay_ratio, tuple_ratio;
    for (const auto& c : out.per_seed) {
        delay_ratio.add(c.delay_ratio);
        tuple_ratio.add(c.cloud_tuple_ratio);
        out.seeds_fog_delay_better += c.fog_delay_better ? 1 : 0;
        out.seeds_fog_traffic_better += c.fog_traffic_better ? 1 : 0;
    }
    out.mean_delay_ratio = delay_ratio.mean();
    out.mean_cloud_tuple_ratio = tuple_ratio.mean();
    return out;
}

inline Jv to_json(const SweepSummary& s) {
    Jv seeds = Jv::array();
    for (const auto& c : s.per_seed) {
        Jv row = Jv::object();
        row.set("seed", c.fog.seed)
            .set("delay_ratio", c.delay_ratio)
            .set("cloud_tuple_ratio", c.cloud_tuple_ratio)
            .set("fog_delay_better", c.fog_delay_better)
            .set("fog_traffic_better", c.fog_traffic_better);
        seeds.push(std::move(row));
    }
    Jv j = Jv::object();
    j.set("seeds", std::move(seeds))
        .set("mean_delay_ratio", s.mean_delay_ratio)
        .set("mean_cloud_tuple_ratio", s.mean_cloud_tuple_ratio)
        .set("seeds_fog_delay_better", s.seeds_fog_delay_better)
        .set("seeds_fog_traffic_better", s.seeds_fog_traffic_better);
    return j;
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        raise("IoError", "cannot write '" + path + "'");
    out << content;
}

}  // namespace fogstream
