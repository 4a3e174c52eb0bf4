#pragma once
// Sensor drivers: periodic and Poisson generators plus CSV trace replay.
// Emission times are pure functions of (spec, seed), independent of placement.

#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "fogstream/random.hpp"
#include "fogstream/types.hpp"

namespace fogstream {

enum class SensorMode { Periodic, Poisson, Trace };

inline const char* to_string(SensorMode m) {
    switch (m) {
        case SensorMode::Periodic: return "periodic";
        case SensorMode::Poisson: return "poisson";
        case SensorMode::Trace: return "trace";
    }
    return "?";
}

struct SensorSpec {
    std::string sensor_id;
    std::string gateway_id;
    SensorMode mode = SensorMode::Periodic;
    double rate = 0.0;        // tuples/s, synthetic modes
    SimTime phase = 0.0;      // ms offset of the first (periodic) emission
    Mi cpu_length = 0.0;      // carried on every emitted tuple
    Bytes tuple_size = 0.0;
    SimTime latency_ms = 0.0;  // sensor-to-gateway hop, latency only
    std::string trace_file;    // Trace mode
};

struct TraceRecord {
    SimTime time_ms = 0.0;
    std::string sensor_id;
    double value = 0.0;  // carried, not interpreted
};

// Emission instants in [phase, horizon), ascending. Poisson draws come from
// the sensor's own substream so results do not depend on other sensors.
inline std::vector<SimTime> emission_times(const SensorSpec& s, SimTime horizon,
                                           RandomStream& rng,
                                           const std::vector<TraceRecord>* trace = nullptr) {
    if (horizon <= 0.0)
        raise("InvalidHorizon", "horizon must be > 0");
    std::vector<SimTime> times;
    switch (s.mode) {
        case SensorMode::Periodic: {
            if (s.rate <= 0.0)
                raise("InvalidSensor", "sensor '" + s.sensor_id + "' has rate <= 0");
            const SimTime period = 1000.0 / s.rate;
            // k-indexed, not accumulated, to keep late instants exact.
            for (std::uint64_t k = 0;; ++k) {
                SimTime t = s.phase + static_cast<double>(k) * period;
                if (t >= horizon)
                    break;
                times.push_back(t);
            }
            break;
        }
        case SensorMode::Poisson: {
            if (s.rate <= 0.0)
                raise("InvalidSensor", "sensor '" + s.sensor_id + "' has rate <= 0");
            Substream& sub = rng.substream("sensor:" + s.sensor_id);
            const double mean = 1000.0 / s.rate;
            for (SimTime t = s.phase + sub.exponential(mean); t < horizon;
                 t += sub.exponential(mean))
                times.push_back(t);
            break;
        }
        case SensorMode::Trace: {
            if (trace == nullptr)
                raise("InvalidSensor",
                      "sensor '" + s.sensor_id + "' is trace-driven but no trace was loaded");
            for (const auto& r : *trace)
                if (r.sensor_id == s.sensor_id && r.time_ms < horizon)
                    times.push_back(r.time_ms);
            break;
        }
    }
    return times;
}

// CSV with header `time_ms,sensor_id,value`. Line numbers count the header.
inline std::vector<TraceRecord> load_trace(std::istream& in,
                                           const std::set<std::string>* known_sensors = nullptr) {
    std::vector<TraceRecord> records;
    std::map<std::string, SimTime> last_time;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line_no == 1) {
            if (line != "time_ms,sensor_id,value")
                raise("ParseError", "line 1: expected header 'time_ms,sensor_id,value'");
            continue;
        }
        if (line.empty())
            continue;
        std::istringstream row(line);
        std::string time_f, sensor_f, value_f;
        if (!std::getline(row, time_f, ',') || !std::getline(row, sensor_f, ',') ||
            !std::getline(row, value_f))
            raise("ParseError", "line " + std::to_string(line_no) + ": expected 3 fields");
        TraceRecord r;
        std::size_t used = 0;
        try {
            r.time_ms = std::stod(time_f, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != time_f.size() || time_f.empty() || r.time_ms < 0.0)
            raise("ParseError",
                  "line " + std::to_string(line_no) + ": bad time_ms '" + time_f + "'");
        try {
            r.value = std::stod(value_f, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != value_f.size() || value_f.empty())
            raise("ParseError",
                  "line " + std::to_string(line_no) + ": bad value '" + value_f + "'");
        r.sensor_id = sensor_f;
        if (known_sensors != nullptr && !known_sensors->count(r.sensor_id))
            raise("UnknownSensor",
                  "line " + std::to_string(line_no) + ": unknown sensor '" + r.sensor_id + "'");
        auto it = last_time.find(r.sensor_id);
        if (it != last_time.end() && r.time_ms < it->second)
            raise("NonMonotoneTrace", "line " + std::to_string(line_no) + ": sensor '" +
                                          r.sensor_id + "' goes back in time");
        last_time[r.sensor_id] = r.time_ms;
        records.push_back(std::move(r));
    }
    if (line_no == 0)
        raise("ParseError", "line 1: empty trace file");
    return records;
}

inline std::vector<TraceRecord> load_trace_file(const std::string& path,
                                                const std::set<std::string>* known = nullptr) {
    std::ifstream in(path);
    if (!in)
        raise("ParseError", "cannot open trace file '" + path + "'");
    return load_trace(in, known);
}

}  // namespace fogstream
