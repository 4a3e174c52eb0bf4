// Command-line front end: run one policy, compare both over a seed sweep, or
// just validate a scenario. Exit codes: 0 ok, 2 config/validation error,
// 3 runtime failure.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fogstream/fogstream.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        std::size_t used = 0;
        std::uint64_t v = 0;
        try {
            v = std::stoull(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size())
            fogstream::raise("ConfigError", "bad seed '" + item + "' in --seeds");
        seeds.push_back(v);
    }
    if (seeds.empty())
        fogstream::raise("ConfigError", "--seeds lists no seeds");
    return seeds;
}

void ensure_out_dir(const std::string& out) {
    std::error_code ec;
    std::filesystem::create_directories(out, ec);
    if (ec)
        fogstream::raise("IoError", "cannot create output directory '" + out + "'");
}

int cmd_run(const std::string& config, const std::string& policy, std::int64_t seed_override,
            const std::string& out, bool trace, const std::string& format) {
    fogstream::Scenario sc = fogstream::load_scenario(config);
    std::uint64_t seed =
        seed_override >= 0 ? static_cast<std::uint64_t>(seed_override) : sc.seed;
    ensure_out_dir(out);

    fogstream::EngineOptions options;
    std::ofstream trace_file;
    if (trace) {
        trace_file.open(out + "/trace.csv", std::ios::binary);
        if (!trace_file)
            fogstream::raise("IoError", "cannot write '" + out + "/trace.csv'");
        trace_file << fogstream::kTraceCsvHeader;
        options.trace_out = &trace_file;
    }
    fogstream::RunResult r = fogstream::run_single(sc, policy, seed, options);

    if (format == "json" || format == "both") {
        fogstream::write_file(out + "/metrics.json", fogstream::to_json(r.metrics).str());
        fogstream::write_file(out + "/placement.json", fogstream::to_json(r.placement).str());
    }
    if (format == "csv" || format == "both") {
        fogstream::write_file(out + "/metrics.csv",
                              std::string(fogstream::kMetricsCsvHeader) +
                                  fogstream::metrics_csv_row(r.metrics));
    }
    std::ofstream series(out + "/delay_series.csv", std::ios::binary);
    fogstream::write_delay_series_csv(series, r.metrics);

    std::printf("policy=%s seed=%llu avg_tuple_delay_ms=%s cloud_tuples=%llu\n",
                r.metrics.policy.c_str(), static_cast<unsigned long long>(r.metrics.seed),
                fogstream::fixed6(r.metrics.avg_tuple_delay_ms).c_str(),
                static_cast<unsigned long long>(r.metrics.cloud_tuples));
    return 0;
}

int cmd_compare(const std::string& config, bool seeds_given, const std::string& seeds_text,
                std::int64_t seed_override, const std::string& out, unsigned jobs) {
    fogstream::Scenario sc = fogstream::load_scenario(config);
    std::vector<std::uint64_t> seeds;
    if (seeds_given)
        seeds = parse_seed_list(seeds_text);
    else if (seed_override >= 0)
        seeds = {static_cast<std::uint64_t>(seed_override)};
    else
        seeds = {sc.seed};
    ensure_out_dir(out);

    fogstream::SweepSummary sum = fogstream::sweep(sc, seeds, jobs);
    for (std::size_t i = 0; i < sum.per_seed.size(); ++i) {
        const auto& c = sum.per_seed[i];
        fogstream::write_file(out + "/comparison_seed" + std::to_string(seeds[i]) + ".json",
                              fogstream::to_json(c).str());
    }
    fogstream::write_file(out + "/summary.json", fogstream::to_json(sum).str());

    std::printf("seeds=%zu mean_delay_ratio=%s mean_cloud_tuple_ratio=%s\n",
                sum.per_seed.size(), fogstream::fixed6(sum.mean_delay_ratio).c_str(),
                fogstream::fixed6(sum.mean_cloud_tuple_ratio).c_str());
    return 0;
}

int cmd_validate(const std::string& config) {
    fogstream::Scenario sc = fogstream::load_scenario(config);
    // Both policies must produce invariant-clean placements.
    bool ok = true;
    for (const char* policy : {"cloud", "edgeward"}) {
        fogstream::Placement p = fogstream::place(policy, sc.app, sc.topo);
        for (const auto& v : fogstream::validate_placement(p, sc.app, sc.topo)) {
            std::fprintf(stderr, "%s: %s (%s)\n", v.code.c_str(), v.subject.c_str(),
                         v.detail.c_str());
            ok = false;
        }
    }
    if (!ok)
        return kExitConfig;
    std::printf("ok: %zu devices, %zu sensors, %zu operators, horizon %s ms\n",
                sc.topo.devices().size(), sc.sensors.size(), sc.app.operators().size(),
                fogstream::fixed6(sc.horizon_ms).c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App cli{"Fog stream-processing placement simulator"};
    cli.require_subcommand(1);

    std::string config;
    std::string policy = "edgeward";
    std::string out = "out";
    std::string seeds_text;
    std::string format = "json";
    std::int64_t seed_override = -1;
    unsigned jobs = 1;
    bool trace = false;

    CLI::App* run = cli.add_subcommand("run", "simulate one placement policy");
    run->add_option("--config", config, "scenario file")->required();
    run->add_option("--policy", policy, "cloud|edgeward")
        ->check(CLI::IsMember({"cloud", "edgeward"}));
    run->add_option("--seed", seed_override, "override the scenario seed");
    run->add_option("--out", out, "output directory");
    run->add_option("--format", format, "json|csv|both")
        ->check(CLI::IsMember({"json", "csv", "both"}));
    run->add_flag("--trace", trace, "write the full event trace");

    CLI::App* cmp = cli.add_subcommand("compare", "edgeward vs cloud over seeds");
    cmp->add_option("--config", config, "scenario file")->required();
    cmp->add_option("--seeds", seeds_text, "comma-separated seed list");
    cmp->add_option("--seed", seed_override, "single seed (overrides scenario)");
    cmp->add_option("--out", out, "output directory");
    cmp->add_option("--jobs", jobs, "worker threads for the sweep");

    CLI::App* val = cli.add_subcommand("validate", "check a scenario file");
    val->add_option("--config", config, "scenario file")->required();

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = cli.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (run->parsed())
            return cmd_run(config, policy, seed_override, out, trace, format);
        if (cmp->parsed())
            return cmd_compare(config, cmp->count("--seeds") > 0, seeds_text, seed_override,
                               out, jobs);
        return cmd_validate(config);
    } catch (const fogstream::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "runtime failure: %s\n", e.what());
        return kExitRuntime;
    }
}
