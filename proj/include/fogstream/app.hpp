#pragma once
// Stream-query application: a DAG of Map/Filter/WindowAggregate operators fed
// by sensors and draining into a single sink. Also the tuple representation
// and the per-instance operator semantics.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fogstream/random.hpp"
#include "fogstream/types.hpp"

namespace fogstream {

inline constexpr const char* kSinkId = "sink";

enum class OpKind { Map, Filter, WindowAggregate };
enum class OpScope { PerGateway, Global };

inline const char* to_string(OpKind k) {
    switch (k) {
        case OpKind::Map: return "map";
        case OpKind::Filter: return "filter";
        case OpKind::WindowAggregate: return "window_aggregate";
    }
    return "?";
}

inline const char* to_string(OpScope s) {
    return s == OpScope::PerGateway ? "per_gateway" : "global";
}

struct OperatorSpec {
    std::string id;
    OpKind kind = OpKind::Map;
    Mi cpu_per_tuple = 0.0;      // carried on this operator's outputs
    Bytes out_tuple_size = 0.0;  // likewise
    double selectivity = 1.0;    // Map (must be 1) / Filter
    SimTime window_ms = 0.0;     // WindowAggregate only
    Mips mips_demand = 0.0;      // reserved on the hosting device
    OpScope scope = OpScope::Global;
};

struct SourceBinding {
    std::string sensor_id;
    std::string operator_id;  // entry operator fed by this sensor
};

struct AppSpec {
    std::vector<OperatorSpec> operators;
    std::vector<std::pair<std::string, std::string>> edges;  // from -> to ("sink" allowed as to)
    std::vector<SourceBinding> sources;
};

// A tuple carries the cost of its own processing: cpu_length is spent at the
// consuming operator's device, network_length on every link it crosses.
struct Tuple {
    std::uint64_t id = 0;
    Mi cpu_length = 0.0;
    Bytes network_length = 0.0;
    SimTime origin_ts = 0.0;  // lineage anchor: latest contributing sensor emission
    std::string emitted_by;   // sensor id or operator instance id
    std::string sensor_id;    // sensor of the lineage anchor
};

class AppModel {
public:
    static AppModel validate(AppSpec spec) {
        if (spec.operators.empty())
            raise("MissingSink", "application has no operators");
        AppModel app;
        for (auto& op : spec.operators) {
            if (app.index_.count(op.id))
                raise("DuplicateOperator", "duplicate operator id '" + op.id + "'");
            if (op.id == kSinkId)
                raise("DuplicateOperator", "'sink' is reserved");
            check_spec(op);
            app.index_[op.id] = app.operators_.size();
            app.operators_.push_back(std::move(op));
        }
        std::set<std::pair<std::string, std::string>> seen;
        for (const auto& [from, to] : spec.edges) {
            if (!app.index_.count(from))
                raise("UnreachableOperator", "edge from unknown operator '" + from + "'");
            if (to != kSinkId && !app.index_.count(to))
                raise("UnreachableOperator", "edge to unknown operator '" + to + "'");
            if (from == to)
                raise("CyclicGraph", "operator '" + from + "' has a self-edge");
            if (!seen.insert({from, to}).second)
                raise("DuplicateEdge", "duplicate edge " + from + " -> " + to);
            if (to == kSinkId) {
                app.sink_feeders_.push_back(from);
            } else {
                if (app.op(from).scope == OpScope::Global &&
                    app.op(to).scope == OpScope::PerGateway)
                    raise("ScopeMismatch", "edge " + from + " -> " + to +
                                               " fans a global stream back out per gateway");
                app.downstream_[from].push_back(to);
                app.upstream_[to].push_back(from);
            }
        }
        if (app.sink_feeders_.empty())
            raise("MissingSink", "no operator feeds the sink");
        std::sort(app.sink_feeders_.begin(), app.sink_feeders_.end());
        for (const auto& sb : spec.sources) {
            if (!app.index_.count(sb.operator_id))
                raise("UnreachableOperator",
                      "sensor '" + sb.sensor_id + "' feeds unknown operator '" +
                          sb.operator_id + "'");
            app.entry_of_[sb.sensor_id] = sb.operator_id;
            app.entry_ops_.insert(sb.operator_id);
        }
        app.fix_topo_order();
        app.check_reachability();
        app.sources_ = std::move(spec.sources);
        return app;
    }

    const std::vector<OperatorSpec>& operators() const noexcept { return operators_; }
    const OperatorSpec& op(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end())
            raise("UnreachableOperator", "no operator '" + id + "'");
        return operators_[it->second];
    }
    bool has_op(const std::string& id) const { return index_.count(id) != 0; }

    // Operator ids in the fixed topological order (ties broken by id).
    const std::vector<std::string>& topo_order() const noexcept { return topo_order_; }

    const std::vector<std::string>& downstream(const std::string& id) const {
        static const std::vector<std::string> none;
        auto it = downstream_.find(id);
        return it == downstream_.end() ? none : it->second;
    }
    const std::vector<std::string>& upstream(const std::string& id) const {
        static const std::vector<std::string> none;
        auto it = upstream_.find(id);
        return it == upstream_.end() ? none : it->second;
    }
    bool feeds_sink(const std::string& id) const {
        return std::binary_search(sink_feeders_.begin(), sink_feeders_.end(), id);
    }
    const std::vector<std::string>& sink_feeders() const noexcept { return sink_feeders_; }
    const std::vector<SourceBinding>& sources() const noexcept { return sources_; }
    const std::string& entry_operator(const std::string& sensor_id) const {
        auto it = entry_of_.find(sensor_id);
        if (it == entry_of_.end())
            raise("UnreachableOperator", "sensor '" + sensor_id + "' has no entry operator");
        return it->second;
    }

private:
    static void check_spec(const OperatorSpec& op) {
        if (op.cpu_per_tuple < 0.0)
            raise("InvalidOperator", "operator '" + op.id + "' has cpu_per_tuple < 0");
        if (op.out_tuple_size < 0.0)
            raise("InvalidOperator", "operator '" + op.id + "' has out_tuple_size < 0");
        if (op.mips_demand <= 0.0)
            raise("InvalidOperator", "operator '" + op.id + "' has mips_demand <= 0");
        switch (op.kind) {
            case OpKind::Map:
                if (op.selectivity != 1.0)
                    raise("InvalidOperator", "map '" + op.id + "' must have selectivity 1");
                break;
            case OpKind::Filter:
                if (op.selectivity < 0.0 || op.selectivity > 1.0)
                    raise("InvalidOperator",
                          "filter '" + op.id + "' selectivity outside [0,1]");
                break;
            case OpKind::WindowAggregate:
                if (op.window_ms <= 0.0)
                    raise("InvalidOperator",
                          "window_aggregate '" + op.id + "' needs window_ms > 0");
                break;
        }
    }

    void fix_topo_order() {
        std::map<std::string, int> indegree;
        for (const auto& op : operators_)
            indegree[op.id] = 0;
        for (const auto& [from, tos] : downstream_)
            for (const auto& to : tos)
                ++indegree[to];
        std::set<std::string> ready;  // ordered: stable tie-break by id
        for (const auto& [id, deg] : indegree)
            if (deg == 0)
                ready.insert(id);
        while (!ready.empty()) {
            std::string id = *ready.begin();
            ready.erase(ready.begin());
            topo_order_.push_back(id);
            for (const auto& to : downstream(id))
                if (--indegree[to] == 0)
                    ready.insert(to);
        }
        if (topo_order_.size() != operators_.size()) {
            std::string cyclic;
            for (const auto& [id, deg] : indegree)
                if (deg > 0)
                    cyclic += cyclic.empty() ? id : ", " + id;
            raise("CyclicGraph", "cycle among operators: " + cyclic);
        }
    }

    void check_reachability() const {
        // Forward from entry operators; backward from sink feeders.
        std::set<std::string> from_source(entry_ops_.begin(), entry_ops_.end());
        for (const auto& id : topo_order_)
            if (from_source.count(id))
                for (const auto& to : downstream(id))
                    from_source.insert(to);
        std::set<std::string> to_sink(sink_feeders_.begin(), sink_feeders_.end());
        for (auto it = topo_order_.rbegin(); it != topo_order_.rend(); ++it)
            if (to_sink.count(*it))
                for (const auto& from : upstream(*it))
                    to_sink.insert(from);
        for (const auto& op : operators_) {
            if (!from_source.count(op.id))
                raise("UnreachableOperator",
                      "operator '" + op.id + "' is fed by no source");
            if (!to_sink.count(op.id))
                raise("MissingSink", "operator '" + op.id + "' cannot reach the sink");
        }
    }

    std::vector<OperatorSpec> operators_;
    std::map<std::string, std::size_t> index_;
    std::map<std::string, std::vector<std::string>> downstream_;
    std::map<std::string, std::vector<std::string>> upstream_;
    std::vector<std::string> sink_feeders_;
    std::vector<std::string> topo_order_;
    std::vector<SourceBinding> sources_;
    std::map<std::string, std::string> entry_of_;
    std::set<std::string> entry_ops_;
};

// Mutable per-run state of one placed operator instance. Map and Filter act
// on each processed tuple; WindowAggregate buffers and emits only at its
// tumbling window boundaries.
class OperatorInstance {
public:
    OperatorInstance(const OperatorSpec* spec, std::string instance_id, std::string gateway)
        : spec_(spec), instance_id_(std::move(instance_id)), gateway_(std::move(gateway)) {}

    const OperatorSpec& spec() const noexcept { return *spec_; }
    const std::string& id() const noexcept { return instance_id_; }
    const std::string& gateway() const noexcept { return gateway_; }  // empty for Global
    std::uint64_t buffered() const noexcept { return buffered_; }

    // Map/Filter outcome for one processed tuple; WindowAggregate absorbs it.
    // Costs of the output are the operator's, lineage is the input's.
    std::vector<Tuple> process(const Tuple& in, Substream& rng) {
        switch (spec_->kind) {
            case OpKind::Map:
                return {derive(in)};
            case OpKind::Filter:
                if (rng.bernoulli(spec_->selectivity))
                    return {derive(in)};
                ++dropped_;
                return {};
            case OpKind::WindowAggregate:
                if (buffered_ == 0 || in.origin_ts > max_origin_) {
                    max_origin_ = in.origin_ts;
                    anchor_sensor_ = in.sensor_id;
                }
                ++buffered_;
                return {};
        }
        return {};
    }

    // Tumbling boundary: one output per non-empty window, lineage = the
    // latest buffered origin; the buffer is cleared either way.
    std::vector<Tuple> close_window() {
        if (buffered_ == 0)
            return {};
        Tuple out;
        out.cpu_length = spec_->cpu_per_tuple;
        out.network_length = spec_->out_tuple_size;
        out.origin_ts = max_origin_;
        out.emitted_by = instance_id_;
        out.sensor_id = anchor_sensor_;
        absorbed_ += buffered_;
        buffered_ = 0;
        max_origin_ = 0.0;
        anchor_sensor_.clear();
        return {out};
    }

    std::uint64_t dropped() const noexcept { return dropped_; }
    std::uint64_t absorbed() const noexcept { return absorbed_; }

private:
    Tuple derive(const Tuple& in) const {
        Tuple out;
        out.cpu_length = spec_->cpu_per_tuple;
        out.network_length = spec_->out_tuple_size;
        out.origin_ts = in.origin_ts;
        out.emitted_by = instance_id_;
        out.sensor_id = in.sensor_id;
        return out;
    }

    const OperatorSpec* spec_;
    std::string instance_id_;
    std::string gateway_;
    std::uint64_t buffered_ = 0;
    SimTime max_origin_ = 0.0;
    std::string anchor_sensor_;
    std::uint64_t dropped_ = 0;
    std::uint64_t absorbed_ = 0;  // cleared into window outputs
};

inline double expected_output_rate(const OperatorSpec& op, double input_rate) {
    if (input_rate < 0.0)
        raise("InvalidOperator", "input_rate must be >= 0");
    switch (op.kind) {
        case OpKind::Map:
        case OpKind::Filter:
            return input_rate * op.selectivity;
        case OpKind::WindowAggregate:
            return input_rate > 0.0 ? 1000.0 / op.window_ms : 0.0;
    }
    return 0.0;
}

}  // namespace fogstream
