#pragma once
// Report emission with byte-stable output: field order is the insertion
// order, every real number is rendered as fixed 6-decimal, counts as
// integers. Golden-file tests depend on this.

#include <cstdint>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "fogstream/metrics.hpp"
#include "fogstream/placement.hpp"
#include "fogstream/types.hpp"

namespace fogstream {

inline std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

// Minimal ordered JSON document builder (output only; parsing stays with the
// vendored json library).
class Jv {
public:
    static Jv object() { Jv v; v.value_ = Obj{}; return v; }
    static Jv array() { Jv v; v.value_ = Arr{}; return v; }
    Jv() : value_(nullptr) {}
    Jv(const char* s) : value_(std::string(s)) {}
    Jv(std::string s) : value_(std::move(s)) {}
    Jv(double d) : value_(d) {}
    Jv(std::uint64_t u) : value_(u) {}
    Jv(int i) : value_(static_cast<std::uint64_t>(i)) {}
    Jv(bool b) : value_(b) {}

    Jv& set(const std::string& key, Jv v) {
        std::get<Obj>(value_).emplace_back(key, std::move(v));
        return *this;
    }
    Jv& push(Jv v) {
        std::get<Arr>(value_).push_back(std::move(v));
        return *this;
    }

    void write(std::ostream& os, int indent = 0) const {
        if (std::holds_alternative<std::nullptr_t>(value_)) {
            os << "null";
        } else if (const auto* b = std::get_if<bool>(&value_)) {
            os << (*b ? "true" : "false");
        } else if (const auto* u = std::get_if<std::uint64_t>(&value_)) {
            os << *u;
        } else if (const auto* d = std::get_if<double>(&value_)) {
            os << fixed6(*d);
        } else if (const auto* s = std::get_if<std::string>(&value_)) {
            write_string(os, *s);
        } else if (const auto* a = std::get_if<Arr>(&value_)) {
            if (a->empty()) {
                os << "[]";
                return;
            }
            os << "[";
            for (std::size_t i = 0; i < a->size(); ++i) {
                os << (i ? ",\n" : "\n") << pad(indent + 2);
                (*a)[i].write(os, indent + 2);
            }
            os << "\n" << pad(indent) << "]";
        } else if (const auto* o = std::get_if<Obj>(&value_)) {
            if (o->empty()) {
                os << "{}";
                return;
            }
            os << "{";
            for (std::size_t i = 0; i < o->size(); ++i) {
                os << (i ? ",\n" : "\n") << pad(indent + 2);
                write_string(os, (*o)[i].first);
                os << ": ";
                (*o)[i].second.write(os, indent + 2);
            }
            os << "\n" << pad(indent) << "}";
        }
    }

    std::string str() const {
        std::ostringstream os;
        write(os);
        os << "\n";
        return os.str();
    }

private:
    using Obj = std::vector<std::pair<std::string, Jv>>;
    using Arr = std::vector<Jv>;

    static std::string pad(int n) { return std::string(static_cast<std::size_t>(n), ' '); }

    static void write_string(std::ostream& os, const std::string& s) {
        os << '"';
        for (char c : s) {
            switch (c) {
                case '"': os << "\\\""; break;
                case '\\': os << "\\\\"; break;
                case '\n': os << "\\n"; break;
                case '\t': os << "\\t"; break;
                default: os << c;
            }
        }
        os << '"';
    }

    std::variant<std::nullptr_t, bool, std::uint64_t, double, std::string, Obj, Arr> value_;
};

inline Jv to_json(const MetricsReport& m) {
    Jv util = Jv::object();
    for (const auto& [dev, u] : m.device_utilization)
        util.set(dev, u);
    Jv lutil = Jv::object();
    for (const auto& [link, u] : m.link_utilization)
        lutil.set(link, u);
    Jv j = Jv::object();
    j.set("policy", m.policy)
        .set("seed", m.seed)
        .set("scenario_hash", m.scenario_hash)
        .set("horizon_ms", m.horizon_ms)
        .set("warmup_fraction", m.warmup_fraction)
        .set("avg_tuple_delay_ms", m.avg_tuple_delay_ms)
        .set("delay_samples", m.delay_samples)
        .set("deliveries_total", m.deliveries_total)
        .set("cloud_tuples", m.cloud_tuples)
        .set("cloud_bytes", m.cloud_bytes)
        .set("device_utilization", std::move(util))
        .set("link_utilization", std::move(lutil));
    return j;
}

inline Jv to_json(const PlacementReport& r) {
    Jv residual = Jv::object();
    for (const auto& [dev, mips] : r.residual_mips)
        residual.set(dev, mips);
    Jv assigned = Jv::object();
    for (const auto& [inst, dev] : r.assignments)
        assigned.set(inst, dev);
    Jv levels = Jv::object();
    for (const auto& [inst, lvl] : r.instance_level)
        levels.set(inst, static_cast<std::uint64_t>(lvl));
    Jv j = Jv::object();
    j.set("policy", r.policy)
        .set("assignments", std::move(assigned))
        .set("instance_level", std::move(levels))
        .set("residual_mips", std::move(residual));
    return j;
}

inline Jv to_json(const ComparisonReport& c) {
    Jv j = Jv::object();
    j.set("seed", c.fog.seed)
        .set("delay_ratio", c.delay_ratio)
        .set("cloud_tuple_ratio", c.cloud_tuple_ratio)
        .set("fog_delay_better", c.fog_delay_better)
        .set("fog_traffic_better", c.fog_traffic_better)
        .set("edgeward", to_json(c.fog))
        .set("cloud", to_json(c.cloud));
    return j;
}

inline const char* kMetricsCsvHeader =
    "policy,seed,horizon_ms,avg_tuple_delay_ms,delay_samples,cloud_tuples,cloud_bytes\n";

inline std::string metrics_csv_row(const MetricsReport& m) {
    std::string s = m.policy;
    s += "," + std::to_string(m.seed);
    s += "," + fixed6(m.horizon_ms);
    s += "," + fixed6(m.avg_tuple_delay_ms);
    s += "," + std::to_string(m.delay_samples);
    s += "," + std::to_string(m.cloud_tuples);
    s += "," + fixed6(m.cloud_bytes);
    s += "\n";
    return s;
}

inline void write_delay_series_csv(std::ostream& os, const MetricsReport& m) {
    os << "bucket_start_ms,samples,mean_delay_ms\n";
    for (const auto& b : m.delay_series)
        os << fixed6(b.bucket_start_ms) << ',' << b.samples << ',' << fixed6(b.mean_delay_ms)
           << '\n';
}

inline const char* kTraceCsvHeader = "time,seq,kind,device,operator\n";

}  // namespace fogstream
