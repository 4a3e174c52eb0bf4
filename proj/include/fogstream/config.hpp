#pragma once
// Scenario configuration: one JSON document holding topology, application,
// workload, and simulation sections. Parsing is strict — unknown keys and
// missing fields are errors that name the offending location.

#include <fstream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "fogstream/app.hpp"
#include "fogstream/random.hpp"
#include "fogstream/topology.hpp"
#include "fogstream/types.hpp"
#include "fogstream/workload.hpp"

namespace fogstream {

inline constexpr int kSchemaVersion = 1;

struct Scenario {
    int schema_version = kSchemaVersion;
    Topology topo;
    AppModel app;
    std::vector<SensorSpec> sensors;  // sorted by sensor id
    std::map<std::string, std::vector<TraceRecord>> traces;  // per trace-mode sensor
    SimTime horizon_ms = 0.0;
    std::uint64_t seed = 0;
    double warmup_fraction = 0.1;
    std::uint64_t hash = 0;  // over the canonical (key-sorted, minified) document
};

namespace cfg_detail {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
    raise("SchemaError", path + ": " + what);
}

inline const json& member(const json& j, const char* key, const std::string& path) {
    if (!j.is_object())
        fail(path, "expected an object");
    auto it = j.find(key);
    if (it == j.end())
        fail(path, "missing required field '" + std::string(key) + "'");
    return *it;
}

inline void allow_only(const json& j, std::initializer_list<const char*> keys,
                       const std::string& path) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : keys)
            if (it.key() == k)
                ok = true;
        if (!ok)
            fail(path, "unknown field '" + it.key() + "'");
    }
}

inline double num(const json& j, const char* key, const std::string& path) {
    const json& v = member(j, key, path);
    if (!v.is_number())
        fail(path + "." + key, "expected a number");
    return v.get<double>();
}

inline double num_or(const json& j, const char* key, double dflt, const std::string& path) {
    if (!j.is_object() || !j.contains(key))
        return dflt;
    return num(j, key, path);
}

inline std::string str(const json& j, const char* key, const std::string& path) {
    const json& v = member(j, key, path);
    if (!v.is_string())
        fail(path + "." + key, "expected a string");
    return v.get<std::string>();
}

inline OpKind op_kind(const std::string& s, const std::string& path) {
    if (s == "map") return OpKind::Map;
    if (s == "filter") return OpKind::Filter;
    if (s == "window_aggregate") return OpKind::WindowAggregate;
    fail(path, "unknown operator kind '" + s + "'");
}

inline OpScope op_scope(const std::string& s, const std::string& path) {
    if (s == "per_gateway") return OpScope::PerGateway;
    if (s == "global") return OpScope::Global;
    fail(path, "unknown scope '" + s + "'");
}

inline SensorMode sensor_mode(const std::string& s, const std::string& path) {
    if (s == "periodic") return SensorMode::Periodic;
    if (s == "poisson") return SensorMode::Poisson;
    if (s == "trace") return SensorMode::Trace;
    fail(path, "unknown sensor mode '" + s + "'");
}

}  // namespace cfg_detail

inline Scenario parse_scenario(const nlohmann::json& j, const std::string& base_dir = ".") {
    using namespace cfg_detail;
    Scenario sc;
    allow_only(j, {"schema_version", "topology", "sensors", "application", "simulation"},
               "$");
    double ver = num(j, "schema_version", "$");
    if (ver != kSchemaVersion)
        fail("$.schema_version", "unsupported version " + std::to_string(ver));

    // topology
    const json& jt = member(j, "topology", "$");
    allow_only(jt, {"devices"}, "$.topology");
    const json& jdevs = member(jt, "devices", "$.topology");
    if (!jdevs.is_array() || jdevs.empty())
        fail("$.topology.devices", "expected a non-empty array");
    std::vector<Device> devices;
    for (std::size_t i = 0; i < jdevs.size(); ++i) {
        std::string path = "$.topology.devices[" + std::to_string(i) + "]";
        const json& jd = jdevs[i];
        allow_only(jd,
                   {"id", "parent", "cpu_capacity_mips", "uplink_latency_ms",
                    "uplink_bandwidth_bytes_per_ms"},
                   path);
        Device d;
        d.id = str(jd, "id", path);
        d.cpu_capacity = num(jd, "cpu_capacity_mips", path);
        if (jd.contains("parent")) {
            d.parent = str(jd, "parent", path);
            d.uplink_latency = num(jd, "uplink_latency_ms", path);
            d.uplink_bandwidth = num(jd, "uplink_bandwidth_bytes_per_ms", path);
        } else if (jd.contains("uplink_latency_ms") || jd.contains("uplink_bandwidth_bytes_per_ms")) {
            fail(path, "root device must not declare uplink fields");
        }
        devices.push_back(std::move(d));
    }
    sc.topo = Topology::build(std::move(devices));

    // sensors
    const json& js = member(j, "sensors", "$");
    if (!js.is_array() || js.empty())
        fail("$.sensors", "expected a non-empty array");
    std::set<std::string> sensor_ids;
    std::set<std::string> gateways(sc.topo.gateway_ids().begin(), sc.topo.gateway_ids().end());
    for (std::size_t i = 0; i < js.size(); ++i) {
        std::string path = "$.sensors[" + std::to_string(i) + "]";
        const json& jsens = js[i];
        allow_only(jsens,
                   {"id", "gateway", "mode", "rate_per_s", "phase_ms", "cpu_length_mi",
                    "tuple_size_bytes", "latency_ms", "trace_file"},
                   path);
        SensorSpec s;
        s.sensor_id = str(jsens, "id", path);
        s.gateway_id = str(jsens, "gateway", path);
        if (!gateways.count(s.gateway_id))
            fail(path + ".gateway", "'" + s.gateway_id + "' is not a leaf gateway");
        s.mode = sensor_mode(str(jsens, "mode", path), path + ".mode");
        if (s.mode != SensorMode::Trace) {
            s.rate = num(jsens, "rate_per_s", path);
            if (s.rate <= 0.0)
                fail(path + ".rate_per_s", "rate must be > 0");
            s.phase = num_or(jsens, "phase_ms", 0.0, path);
            if (s.phase < 0.0)
                fail(path + ".phase_ms", "phase must be >= 0");
        } else {
            s.trace_file = str(jsens, "trace_file", path);
        }
        s.cpu_length = num(jsens, "cpu_length_mi", path);
        s.tuple_size = num(jsens, "tuple_size_bytes", path);
        if (s.cpu_length < 0.0 || s.tuple_size < 0.0)
            fail(path, "tuple costs must be >= 0");
        s.latency_ms = num_or(jsens, "latency_ms", 0.0, path);
        if (s.latency_ms < 0.0)
            fail(path + ".latency_ms", "latency must be >= 0");
        if (!sensor_ids.insert(s.sensor_id).second)
            fail(path + ".id", "duplicate sensor id '" + s.sensor_id + "'");
        sc.sensors.push_back(std::move(s));
    }
    std::sort(sc.sensors.begin(), sc.sensors.end(),
              [](const SensorSpec& a, const SensorSpec& b) { return a.sensor_id < b.sensor_id; });

    // application
    const json& ja = member(j, "application", "$");
    allow_only(ja, {"operators", "edges", "sources"}, "$.application");
    AppSpec app;
    const json& jops = member(ja, "operators", "$.application");
    if (!jops.is_array() || jops.empty())
        fail("$.application.operators", "expected a non-empty array");
    for (std::size_t i = 0; i < jops.size(); ++i) {
        std::string path = "$.application.operators[" + std::to_string(i) + "]";
        const json& jo = jops[i];
        allow_only(jo,
                   {"id", "kind", "cpu_per_tuple_mi", "out_tuple_size_bytes", "selectivity",
                    "window_ms", "mips_demand", "scope"},
                   path);
        OperatorSpec op;
        op.id = str(jo, "id", path);
        op.kind = op_kind(str(jo, "kind", path), path + ".kind");
        op.cpu_per_tuple = num(jo, "cpu_per_tuple_mi", path);
        op.out_tuple_size = num(jo, "out_tuple_size_bytes", path);
        op.mips_demand = num(jo, "mips_demand", path);
        op.scope = op_scope(str(jo, "scope", path), path + ".scope");
        if (op.kind == OpKind::WindowAggregate) {
            op.window_ms = num(jo, "window_ms", path);
            if (jo.contains("selectivity"))
                fail(path, "window_aggregate takes window_ms, not selectivity");
        } else {
            op.selectivity = num_or(jo, "selectivity", 1.0, path);
            if (jo.contains("window_ms"))
                fail(path, "window_ms is only valid for window_aggregate");
        }
        app.operators.push_back(std::move(op));
    }
    const json& jedges = member(ja, "edges", "$.application");
    if (!jedges.is_array())
        fail("$.application.edges", "expected an array");
    for (std::size_t i = 0; i < jedges.size(); ++i) {
        std::string path = "$.application.edges[" + std::to_string(i) + "]";
        const json& je = jedges[i];
        if (!je.is_array() || je.size() != 2 || !je[0].is_string() || !je[1].is_string())
            fail(path, "expected [\"from\", \"to\"]");
        app.edges.emplace_back(je[0].get<std::string>(), je[1].get<std::string>());
    }
    const json& jsrc = member(ja, "sources", "$.application");
    if (!jsrc.is_array() || jsrc.empty())
        fail("$.application.sources", "expected a non-empty array");
    std::set<std::string> bound;
    for (std::size_t i = 0; i < jsrc.size(); ++i) {
        std::string path = "$.application.sources[" + std::to_string(i) + "]";
        const json& jb = jsrc[i];
        allow_only(jb, {"sensor", "operator"}, path);
        SourceBinding sb;
        sb.sensor_id = str(jb, "sensor", path);
        sb.operator_id = str(jb, "operator", path);
        if (!sensor_ids.count(sb.sensor_id))
            fail(path + ".sensor", "unknown sensor '" + sb.sensor_id + "'");
        if (!bound.insert(sb.sensor_id).second)
            fail(path + ".sensor", "sensor '" + sb.sensor_id + "' bound twice");
        app.sources.push_back(std::move(sb));
    }
    for (const auto& id : sensor_ids)
        if (!bound.count(id))
            raise("UnboundSensor", "sensor '" + id + "' feeds no operator");
    sc.app = AppModel::validate(std::move(app));

    // simulation
    const json& jsim = member(j, "simulation", "$");
    allow_only(jsim, {"horizon_ms", "seed", "warmup_fraction"}, "$.simulation");
    sc.horizon_ms = num(jsim, "horizon_ms", "$.simulation");
    if (sc.horizon_ms <= 0.0)
        fail("$.simulation.horizon_ms", "horizon must be > 0");
    const nlohmann::json& jseed = member(jsim, "seed", "$.simulation");
    if (jseed.is_number_unsigned())
        sc.seed = jseed.get<std::uint64_t>();
    else if (jseed.is_number_integer() && jseed.get<std::int64_t>() >= 0)
        sc.seed = static_cast<std::uint64_t>(jseed.get<std::int64_t>());
    else
        fail("$.simulation.seed", "seed must be a nonnegative integer");
    sc.warmup_fraction = num_or(jsim, "warmup_fraction", 0.1, "$.simulation");
    if (sc.warmup_fraction < 0.0 || sc.warmup_fraction >= 1.0)
        fail("$.simulation.warmup_fraction", "must be in [0,1)");

    // traces for trace-mode sensors
    for (const auto& s : sc.sensors) {
        if (s.mode != SensorMode::Trace)
            continue;
        std::string full = s.trace_file;
        if (!full.empty() && full.front() != '/')
            full = base_dir + "/" + full;
        std::vector<TraceRecord> recs = load_trace_file(full, &sensor_ids);
        std::vector<TraceRecord> own;
        for (auto& r : recs)
            if (r.sensor_id == s.sensor_id)
                own.push_back(std::move(r));
        sc.traces[s.sensor_id] = std::move(own);
    }

    sc.hash = detail::fnv1a64(j.dump());
    return sc;
}

inline Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        raise("ConfigError", "cannot open scenario file '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        // nlohmann reports "... at line L, column C ..." for text input.
        raise("ParseError", std::string(e.what()));
    }
    std::string dir = ".";
    auto slash = path.find_last_of('/');
    if (slash != std::string::npos)
        dir = path.substr(0, slash);
    return parse_scenario(j, dir);
}

}  // namespace fogstream
