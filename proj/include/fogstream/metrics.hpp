#pragma once
// The two headline measures — average end-to-end tuple delay and core-network
// usage — plus device/link utilization and a bucketed delay time series.

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "fogstream/engine.hpp"
#include "fogstream/types.hpp"

namespace fogstream {

// Compensated (Kahan) accumulator; the mean is exact to ~1 ulp per sample.
class KahanMean {
public:
    void add(double x) {
        double y = x - comp_;
        double t = sum_ + y;
        comp_ = (t - sum_) - y;
        sum_ = t;
        ++count_;
    }
    double sum() const noexcept { return sum_; }
    std::uint64_t count() const noexcept { return count_; }
    double mean() const noexcept { return count_ == 0 ? 0.0 : sum_ / static_cast<double>(count_); }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
    std::uint64_t count_ = 0;
};

inline SimTime tuple_delay(const SinkSample& s) { return s.time - s.origin; }

struct DelayBucket {
    SimTime bucket_start_ms = 0.0;
    std::uint64_t samples = 0;
    double mean_delay_ms = 0.0;
};

struct MetricsReport {
    std::string policy;
    std::uint64_t seed = 0;
    SimTime horizon_ms = 0.0;
    double warmup_fraction = 0.0;
    double avg_tuple_delay_ms = 0.0;
    std::uint64_t delay_samples = 0;      // deliveries after warm-up
    std::uint64_t deliveries_total = 0;   // including warm-up
    std::uint64_t cloud_tuples = 0;
    Bytes cloud_bytes = 0.0;
    std::map<std::string, double> device_utilization;
    std::map<std::string, double> link_utilization;
    std::vector<DelayBucket> delay_series;  // 1 s buckets, all deliveries
    std::uint64_t scenario_hash = 0;
};

// Aggregates a run log. Warm-up excludes early deliveries from the average
// (and only from the average); core-network counts span the whole run.
inline MetricsReport build_metrics(const RawRunLog& log, const std::string& policy,
                                   double warmup_fraction, std::uint64_t scenario_hash = 0) {
    if (warmup_fraction < 0.0 || warmup_fraction >= 1.0)
        raise("InvalidWarmup", "warmup_fraction must be in [0,1)");
    MetricsReport m;
    m.policy = policy;
    m.seed = log.seed;
    m.horizon_ms = log.horizon;
    m.warmup_fraction = warmup_fraction;
    m.scenario_hash = scenario_hash;
    m.deliveries_total = log.deliveries.size();
    m.cloud_tuples = log.cloud_tuples;
    m.cloud_bytes = log.cloud_bytes;

    const SimTime warm_end = warmup_fraction * log.horizon;
    KahanMean mean;
    std::map<std::uint64_t, KahanMean> buckets;
    for (const auto& s : log.deliveries) {
        SimTime d = tuple_delay(s);
        if (s.time >= warm_end)
            mean.add(d);
        buckets[static_cast<std::uint64_t>(s.time / 1000.0)].add(d);
    }
    m.avg_tuple_delay_ms = mean.mean();
    m.delay_samples = mean.count();
    for (const auto& [b, acc] : buckets)
        m.delay_series.push_back({static_cast<SimTime>(b) * 1000.0, acc.count(), acc.mean()});

    for (const auto& [dev, busy] : log.device_busy_ms)
        m.device_utilization[dev] = std::min(busy / log.horizon, 1.0);
    for (const auto& [link, busy] : log.link_busy_ms)
        m.link_utilization[link] = std::min(busy / log.horizon, 1.0);
    return m;
}

struct ComparisonReport {
    MetricsReport fog;    // edgeward
    MetricsReport cloud;  // everything at the root
    double delay_ratio = 0.0;        // fog / cloud
    double cloud_tuple_ratio = 0.0;  // fog / cloud
    bool fog_delay_better = false;
    bool fog_traffic_better = false;
};

inline ComparisonReport compare(const MetricsReport& fog, const MetricsReport& cloud) {
    if (fog.seed != cloud.seed)
        raise("MismatchedRuns", "comparing runs with different seeds");
    if (fog.scenario_hash != cloud.scenario_hash)
        raise("MismatchedRuns", "comparing runs of different scenarios");
    ComparisonReport r;
    r.fog = fog;
    r.cloud = cloud;
    r.delay_ratio = cloud.avg_tuple_delay_ms > 0.0
                        ? fog.avg_tuple_delay_ms / cloud.avg_tuple_delay_ms
                        : (fog.avg_tuple_delay_ms > 0.0 ? HUGE_VAL : 1.0);
    r.cloud_tuple_ratio =
        cloud.cloud_tuples > 0
            ? static_cast<double>(fog.cloud_tuples) / static_cast<double>(cloud.cloud_tuples)
            : (fog.cloud_tuples > 0 ? HUGE_VAL : 1.0);
    r.fog_delay_better = fog.avg_tuple_delay_ms < cloud.avg_tuple_delay_ms;
    r.fog_traffic_better = fog.cloud_tuples < cloud.cloud_tuples;
    return r;
}

}  // namespace fogstream
