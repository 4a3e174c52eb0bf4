#pragma once
// Executes a placed application on the event kernel: one FIFO CPU server per
// device, store-and-forward FIFO links (transmission serialized, latency
// pipelined), tuples routed along the device tree between operator instances.

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdio>
#include <deque>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "fogstream/app.hpp"
#include "fogstream/kernel.hpp"
#include "fogstream/placement.hpp"
#include "fogstream/random.hpp"
#include "fogstream/topology.hpp"
#include "fogstream/workload.hpp"

namespace fogstream {

inline SimTime service_time(Mi cpu_length, Mips capacity) {
    if (capacity <= 0.0)
        raise("NonPositiveCapacity", "service on capacity <= 0");
    if (cpu_length < 0.0)
        raise("InvalidOperator", "cpu_length < 0");
    return 1000.0 * cpu_length / capacity;
}

struct TraceRow {
    SimTime time = 0.0;
    std::uint64_t seq = 0;
    std::string kind;
    std::string device;
    std::string op;  // sensor id, instance id, "sink", or empty
};

struct SinkSample {
    SimTime time = 0.0;
    SimTime origin = 0.0;
    Bytes bytes = 0.0;
};

struct RawRunLog {
    SimTime horizon = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t events_processed = 0;

    // Tuple accounting; every created tuple reaches exactly one terminal.
    std::uint64_t produced_sensor = 0;
    std::uint64_t produced_ops = 0;
    std::uint64_t delivered = 0;
    std::uint64_t filter_dropped = 0;
    std::uint64_t transformed = 0;  // consumed by Map/Filter to make outputs
    std::uint64_t window_absorbed = 0;
    std::uint64_t window_buffered_end = 0;
    std::uint64_t in_flight_end = 0;
    std::uint64_t cpu_queued_end = 0;
    std::uint64_t in_service_end = 0;

    std::uint64_t cloud_tuples = 0;  // completed crossings of root-incident links
    Bytes cloud_bytes = 0.0;

    std::vector<SinkSample> deliveries;
    std::map<std::string, SimTime> device_busy_ms;
    std::map<std::string, SimTime> link_busy_ms;  // "<child>:up" / "<child>:down"
    std::vector<TraceRow> trace;                  // only when captured
};

inline std::uint64_t produced_total(const RawRunLog& g) {
    return g.produced_sensor + g.produced_ops;
}

inline bool conservation_holds(const RawRunLog& g) {
    return g.delivered + g.filter_dropped + g.transformed + g.window_absorbed +
               g.window_buffered_end + g.in_flight_end + g.cpu_queued_end +
               g.in_service_end ==
           produced_total(g);
}

struct EngineOptions {
    bool capture_trace = false;
    std::ostream* trace_out = nullptr;
    // Trace-mode sensors read their records here, keyed by sensor id.
    const std::map<std::string, std::vector<TraceRecord>>* traces = nullptr;
};

class Engine {
public:
    Engine(const Topology& topo, const AppModel& app, const Placement& placement,
           std::vector<SensorSpec> sensors, SimTime horizon, std::uint64_t seed,
           EngineOptions options = {})
        : topo_(topo),
          app_(app),
          placement_(placement),
          sensors_(std::move(sensors)),
          horizon_(horizon),
          rng_(seed),
          options_(options) {
        if (horizon_ <= 0.0)
            raise("InvalidHorizon", "horizon must be > 0");
        if (!validate_placement(placement_, app_, topo_).empty())
            raise("InvalidPlacement", "placement violates its invariants");
        std::sort(sensors_.begin(), sensors_.end(),
                  [](const SensorSpec& a, const SensorSpec& b) {
                      return a.sensor_id < b.sensor_id;
                  });
        log_.horizon = horizon_;
        log_.seed = seed;
        index_world();
    }

    RawRunLog run() {
        schedule_initial();
        KernelStats stats = queue_.run_until(horizon_, [this](const Ev& e) { handle(e); });
        log_.events_processed = stats.events_processed;
        finish_accounting();
        row(horizon_, queue_.next_seq(), EventKind::SimEnd, -1, "");
        return std::move(log_);
    }

private:
    struct Payload {
        std::int64_t tuple = -1;
        std::int32_t sensor = -1;    // TupleEmit: emitting sensor
        std::int32_t instance = -1;  // boundary emit / delivery target
        std::int32_t device = -1;    // arrival or processing device
        std::int32_t route = -1;     // route-cache id; -1 = direct
        std::int32_t hop = -1;       // arrival device's index within route
        bool to_sink = false;
        bool last = true;  // arrival is at the tuple's destination device
    };
    using Queue = EventQueue<Payload>;
    using Ev = Queue::Event;

    struct TupleRec {
        Mi cpu = 0.0;
        Bytes bytes = 0.0;
        SimTime origin = 0.0;
        std::int32_t sensor = -1;  // lineage anchor
    };

    struct Job {
        std::int64_t tuple = -1;
        std::int32_t instance = -1;
    };

    struct DeviceRt {
        bool in_service = false;
        std::deque<Job> waiting;
        SimTime busy_ms = 0.0;
    };

    struct LinkRt {
        SimTime busy_until = 0.0;
        SimTime busy_ms = 0.0;
    };

    // ---- static world indexing ------------------------------------------

    void index_world() {
        const auto& devs = topo_.devices();
        for (std::size_t i = 0; i < devs.size(); ++i)
            device_idx_[devs[i].id] = static_cast<std::int32_t>(i);
        root_ = device_idx_.at(topo_.cloud_id());
        device_rt_.resize(devs.size());
        link_rt_.assign(devs.size(), std::array<LinkRt, 2>{});

        for (std::size_t i = 0; i < sensors_.size(); ++i) {
            const SensorSpec& s = sensors_[i];
            if (sensor_idx_.count(s.sensor_id))
                raise("InvalidSensor", "duplicate sensor id '" + s.sensor_id + "'");
            sensor_idx_[s.sensor_id] = static_cast<std::int32_t>(i);
            if (!topo_.has_device(s.gateway_id))
                raise("UnknownDevice",
                      "sensor '" + s.sensor_id + "' attaches to unknown '" + s.gateway_id + "'");
        }
        for (const auto& inst : placement_.instances) {
            instance_idx_[inst.id] = static_cast<std::int32_t>(instances_.size());
            instances_.emplace_back(&app_.op(inst.op_id), inst.id, inst.gateway);
            instance_device_.push_back(device_idx_.at(placement_.device_of(inst.id)));
        }
    }

    std::int32_t instance_of(const std::string& op_id, const std::string& gateway) const {
        const OperatorSpec& op = app_.op(op_id);
        auto it = instance_idx_.find(
            instance_id(op_id, op.scope == OpScope::PerGateway ? gateway : std::string()));
        if (it == instance_idx_.end())
            raise("Unassigned", "no instance of '" + op_id + "' for gateway '" + gateway + "'");
        return it->second;
    }

    std::int32_t route_id(std::int32_t from, std::int32_t to) {
        auto key = std::make_pair(from, to);
        auto it = route_ids_.find(key);
        if (it != route_ids_.end())
            return it->second;
        std::vector<std::int32_t> hops;
        for (const auto& id :
             topo_.route(topo_.devices()[from].id, topo_.devices()[to].id))
            hops.push_back(device_idx_.at(id));
        routes_.push_back(std::move(hops));
        std::int32_t rid = static_cast<std::int32_t>(routes_.size() - 1);
        route_ids_[key] = rid;
        return rid;
    }

    // ---- trace ----------------------------------------------------------

    void row(SimTime t, std::uint64_t seq, EventKind kind, std::int32_t device,
             const std::string& op) {
        if (!options_.capture_trace && options_.trace_out == nullptr)
            return;
        row_named(t, seq, to_string(kind), device, op);
    }

    void row_named(SimTime t, std::uint64_t seq, const char* kind, std::int32_t device,
                   const std::string& op) {
        if (!options_.capture_trace && options_.trace_out == nullptr)
            return;
        std::string dev = device >= 0 ? topo_.devices()[device].id : std::string();
        if (options_.capture_trace)
            log_.trace.push_back({t, seq, kind, dev, op});
        if (options_.trace_out != nullptr) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.6f,%llu,", t,
                          static_cast<unsigned long long>(seq));
            *options_.trace_out << buf << kind << ',' << dev << ',' << op << '\n';
        }
    }

    // ---- initial schedule ----------------------------------------------

    void schedule_initial() {
        for (std::size_t i = 0; i < sensors_.size(); ++i) {
            const SensorSpec& s = sensors_[i];
            const std::vector<TraceRecord>* tr = nullptr;
            if (s.mode == SensorMode::Trace) {
                if (options_.traces == nullptr || !options_.traces->count(s.sensor_id))
                    raise("InvalidSensor",
                          "sensor '" + s.sensor_id + "' is trace-driven but no trace was loaded");
                tr = &options_.traces->at(s.sensor_id);
            }
            for (SimTime t : emission_times(s, horizon_, rng_, tr)) {
                Payload p;
                p.sensor = static_cast<std::int32_t>(i);
                queue_.schedule(t, EventKind::TupleEmit, p);
            }
        }
        for (std::size_t i = 0; i < instances_.size(); ++i) {
            const OperatorSpec& op = instances_[i].spec();
            if (op.kind == OpKind::WindowAggregate && op.window_ms <= horizon_) {
                Payload p;
                p.instance = static_cast<std::int32_t>(i);
                window_k_.emplace(static_cast<std::int32_t>(i), 1);
                queue_.schedule(op.window_ms, EventKind::TupleEmit, p);
            }
        }
    }

    // ---- event handling -------------------------------------------------

    void handle(const Ev& e) {
        switch (e.kind) {
            case EventKind::TupleEmit:
                if (e.payload.sensor >= 0)
                    on_sensor_emit(e);
                else
                    on_window_boundary(e);
                break;
            case EventKind::TupleArrival:
                on_arrival(e);
                break;
            case EventKind::TransferComplete:
                on_transfer_complete(e);
                break;
            case EventKind::ProcessingComplete:
                on_processing_complete(e);
                break;
            case EventKind::SimEnd:
                break;
        }
    }

    void on_sensor_emit(const Ev& e) {
        const SensorSpec& s = sensors_[static_cast<std::size_t>(e.payload.sensor)];
        std::int64_t tid = static_cast<std::int64_t>(tuples_.size());
        tuples_.push_back({s.cpu_length, s.tuple_size, e.fire_at, e.payload.sensor});
        ++log_.produced_sensor;
        std::int32_t gw = device_idx_.at(s.gateway_id);
        row(e.fire_at, e.seq, EventKind::TupleEmit, gw, s.sensor_id);

        std::int32_t inst = instance_of(app_.entry_operator(s.sensor_id), s.gateway_id);
        Payload p;
        p.tuple = tid;
        p.instance = inst;
        p.device = gw;
        p.last = instance_device_[static_cast<std::size_t>(inst)] == gw;
        queue_.schedule(e.fire_at + s.latency_ms, EventKind::TupleArrival, p);
    }

    void on_window_boundary(const Ev& e) {
        std::int32_t ii = e.payload.instance;
        OperatorInstance& inst = instances_[static_cast<std::size_t>(ii)];
        std::vector<Tuple> outs = inst.close_window();
        if (!outs.empty()) {
            row(e.fire_at, e.seq, EventKind::TupleEmit,
                instance_device_[static_cast<std::size_t>(ii)], inst.id());
            emit_outputs(ii, outs, e.fire_at);
        }
        std::uint64_t k = ++window_k_[ii];
        SimTime next = inst.spec().window_ms * static_cast<double>(k);
        if (next <= horizon_) {
            Payload p;
            p.instance = ii;
            queue_.schedule(next, EventKind::TupleEmit, p);
        }
    }

    void on_arrival(const Ev& e) {
        const Payload& p = e.payload;
        // A completed hop over a root-incident edge is a core-network crossing.
        if (p.route >= 0 && p.hop >= 1) {
            const auto& r = routes_[static_cast<std::size_t>(p.route)];
            if (r[static_cast<std::size_t>(p.hop - 1)] == root_ ||
                r[static_cast<std::size_t>(p.hop)] == root_) {
                ++log_.cloud_tuples;
                log_.cloud_bytes += tuples_[static_cast<std::size_t>(p.tuple)].bytes;
            }
        }
        if (!p.last) {
            row(e.fire_at, e.seq, EventKind::TupleArrival, p.device, "");
            if (p.route >= 0) {
                transmit(p.tuple, p.route, p.hop, e.fire_at, p.instance, p.to_sink);
            } else {
                std::int32_t to = p.to_sink
                                      ? root_
                                      : instance_device_[static_cast<std::size_t>(p.instance)];
                dispatch(p.tuple, p.device, to, p.instance, p.to_sink, e.fire_at);
            }
            return;
        }
        if (p.to_sink) {
            const TupleRec& t = tuples_[static_cast<std::size_t>(p.tuple)];
            row_named(e.fire_at, e.seq, "SinkDelivery", p.device, kSinkId);
            log_.deliveries.push_back({e.fire_at, t.origin, t.bytes});
            ++log_.delivered;
            return;
        }
        row(e.fire_at, e.seq, EventKind::TupleArrival, p.device,
            instances_[static_cast<std::size_t>(p.instance)].id());
        cpu_enqueue(p.device, p.tuple, p.instance, e.fire_at, e.seq);
    }

    void on_transfer_complete(const Ev& e) {
        const Payload& p = e.payload;
        const auto& r = routes_[static_cast<std::size_t>(p.route)];
        std::int32_t a = r[static_cast<std::size_t>(p.hop)];
        std::int32_t b = r[static_cast<std::size_t>(p.hop + 1)];
        row(e.fire_at, e.seq, EventKind::TransferComplete, a, "");
        const Device& child = deeper(a, b);
        Payload q = p;
        q.hop = p.hop + 1;
        q.device = b;
        q.last = static_cast<std::size_t>(q.hop) + 1 == r.size();
        queue_.schedule(e.fire_at + child.uplink_latency, EventKind::TupleArrival, q);
    }

    void on_processing_complete(const Ev& e) {
        const Payload& p = e.payload;
        std::int32_t ii = p.instance;
        OperatorInstance& inst = instances_[static_cast<std::size_t>(ii)];
        row(e.fire_at, e.seq, EventKind::ProcessingComplete, p.device, inst.id());

        const TupleRec& rec = tuples_[static_cast<std::size_t>(p.tuple)];
        Tuple in;
        in.id = static_cast<std::uint64_t>(p.tuple);
        in.cpu_length = rec.cpu;
        in.network_length = rec.bytes;
        in.origin_ts = rec.origin;
        if (rec.sensor >= 0)
            in.sensor_id = sensors_[static_cast<std::size_t>(rec.sensor)].sensor_id;
        std::vector<Tuple> outs =
            inst.process(in, rng_.substream("op:" + inst.id()));
        if (inst.spec().kind == OpKind::WindowAggregate) {
            // input absorbed into the open window; terminal decided later
        } else if (outs.empty()) {
            ++log_.filter_dropped;
        } else {
            ++log_.transformed;
            emit_outputs(ii, outs, e.fire_at);
        }

        DeviceRt& d = device_rt_[static_cast<std::size_t>(p.device)];
        if (!d.waiting.empty()) {
            Job j = d.waiting.front();
            d.waiting.pop_front();
            start_service(p.device, j.tuple, j.instance, e.fire_at, e.seq);
        } else {
            d.in_service = false;
        }
    }

    // ---- mechanics ------------------------------------------------------

    void emit_outputs(std::int32_t from_inst, const std::vector<Tuple>& protos, SimTime now) {
        const OperatorInstance& inst = instances_[static_cast<std::size_t>(from_inst)];
        const OperatorSpec& op = inst.spec();
        std::int32_t from_dev = instance_device_[static_cast<std::size_t>(from_inst)];
        for (const Tuple& proto : protos) {
            std::int32_t anchor = -1;
            if (!proto.sensor_id.empty())
                anchor = sensor_idx_.at(proto.sensor_id);
            for (const auto& down : app_.downstream(op.id)) {
                std::int32_t target = instance_of(down, inst.gateway());
                std::int64_t tid = clone(proto, anchor);
                dispatch(tid, from_dev, instance_device_[static_cast<std::size_t>(target)],
                         target, false, now);
            }
            if (app_.feeds_sink(op.id)) {
                std::int64_t tid = clone(proto, anchor);
                dispatch(tid, from_dev, root_, -1, true, now);
            }
        }
    }

    std::int64_t clone(const Tuple& proto, std::int32_t anchor) {
        std::int64_t tid = static_cast<std::int64_t>(tuples_.size());
        tuples_.push_back({proto.cpu_length, proto.network_length, proto.origin_ts, anchor});
        ++log_.produced_ops;
        return tid;
    }

    void dispatch(std::int64_t tuple, std::int32_t from, std::int32_t to,
                  std::int32_t instance, bool to_sink, SimTime now) {
        if (from == to) {
            Payload p;
            p.tuple = tuple;
            p.instance = instance;
            p.device = to;
            p.to_sink = to_sink;
            p.last = true;
            queue_.schedule(now, EventKind::TupleArrival, p);
            return;
        }
        transmit(tuple, route_id(from, to), 0, now, instance, to_sink);
    }

    void transmit(std::int64_t tuple, std::int32_t rid, std::int32_t hop, SimTime now,
                  std::int32_t instance, bool to_sink) {
        const auto& r = routes_[static_cast<std::size_t>(rid)];
        std::int32_t a = r[static_cast<std::size_t>(hop)];
        std::int32_t b = r[static_cast<std::size_t>(hop + 1)];
        const Device& child = deeper(a, b);
        bool up = &child == &topo_.devices()[static_cast<std::size_t>(a)];
        LinkRt& link =
            link_rt_[static_cast<std::size_t>(device_idx_.at(child.id))][up ? 0 : 1];
        SimTime tx_start = std::max(now, link.busy_until);
        SimTime tx_end =
            tx_start + tuples_[static_cast<std::size_t>(tuple)].bytes / child.uplink_bandwidth;
        link.busy_until = tx_end;
        link.busy_ms += std::min(tx_end, horizon_) - std::min(tx_start, horizon_);
        Payload p;
        p.tuple = tuple;
        p.instance = instance;
        p.route = rid;
        p.hop = hop;
        p.to_sink = to_sink;
        queue_.schedule(tx_end, EventKind::TransferComplete, p);
    }

    const Device& deeper(std::int32_t a, std::int32_t b) const {
        const Device& da = topo_.devices()[static_cast<std::size_t>(a)];
        const Device& db = topo_.devices()[static_cast<std::size_t>(b)];
        return da.level > db.level ? da : db;
    }

    void cpu_enqueue(std::int32_t device, std::int64_t tuple, std::int32_t instance,
                     SimTime now, std::uint64_t seq) {
        DeviceRt& d = device_rt_[static_cast<std::size_t>(device)];
        if (d.in_service) {
            d.waiting.push_back({tuple, instance});
            return;
        }
        start_service(device, tuple, instance, now, seq);
    }

    void start_service(std::int32_t device, std::int64_t tuple, std::int32_t instance,
                       SimTime now, std::uint64_t seq) {
        DeviceRt& d = device_rt_[static_cast<std::size_t>(device)];
        d.in_service = true;
        const Device& dev = topo_.devices()[static_cast<std::size_t>(device)];
        SimTime svc =
            service_time(tuples_[static_cast<std::size_t>(tuple)].cpu, dev.cpu_capacity);
        row_named(now, seq, "ServiceStart", device,
                  instances_[static_cast<std::size_t>(instance)].id());
        d.busy_ms += std::min(now + svc, horizon_) - now;
        Payload p;
        p.tuple = tuple;
        p.instance = instance;
        p.device = device;
        queue_.schedule(now + svc, EventKind::ProcessingComplete, p);
    }

    // ---- end-of-run -----------------------------------------------------

    void finish_accounting() {
        for (const auto& ev : queue_.remaining()) {
            switch (ev.kind) {
                case EventKind::TupleArrival:
                case EventKind::TransferComplete:
                    ++log_.in_flight_end;
                    break;
                case EventKind::ProcessingComplete:
                    ++log_.in_service_end;
                    break;
                default:
                    break;  // unfired window boundaries carry no tuple
            }
        }
        for (const auto& d : device_rt_)
            log_.cpu_queued_end += d.waiting.size();
        for (const auto& inst : instances_) {
            log_.window_buffered_end += inst.buffered();
            log_.window_absorbed += inst.absorbed();
        }
        const auto& devs = topo_.devices();
        for (std::size_t i = 0; i < devs.size(); ++i)
            log_.device_busy_ms[devs[i].id] = device_rt_[i].busy_ms;
        for (std::size_t i = 0; i < devs.size(); ++i) {
            if (!devs[i].parent)
                continue;
            log_.link_busy_ms[devs[i].id + ":up"] = link_rt_[i][0].busy_ms;
            log_.link_busy_ms[devs[i].id + ":down"] = link_rt_[i][1].busy_ms;
        }
    }

    const Topology& topo_;
    const AppModel& app_;
    const Placement& placement_;
    std::vector<SensorSpec> sensors_;
    SimTime horizon_;
    RandomStream rng_;
    EngineOptions options_;

    Queue queue_;
    RawRunLog log_;
    std::vector<TupleRec> tuples_;
    std::vector<OperatorInstance> instances_;
    std::vector<std::int32_t> instance_device_;
    std::map<std::string, std::int32_t> instance_idx_;
    std::map<std::string, std::int32_t> device_idx_;
    std::map<std::string, std::int32_t> sensor_idx_;
    std::map<std::int32_t, std::uint64_t> window_k_;
    std::vector<DeviceRt> device_rt_;
    std::vector<std::array<LinkRt, 2>> link_rt_;
    std::vector<std::vector<std::int32_t>> routes_;
    std::map<std::pair<std::int32_t, std::int32_t>, std::int32_t> route_ids_;
    std::int32_t root_ = 0;
};

// Convenience wrapper matching the scenario-level contract.
inline RawRunLog simulate(const Topology& topo, const AppModel& app,
                          const Placement& placement, std::vector<SensorSpec> sensors,
                          SimTime horizon, std::uint64_t seed, EngineOptions options = {}) {
    Engine engine(topo, app, placement, std::move(sensors), horizon, seed, options);
    return engine.run();
}

}  // namespace fogstream
