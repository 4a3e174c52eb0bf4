#pragma once
// Operator-instance placement over the device tree. Two policies: everything
// on the cloud, or a deterministic greedy walk that keeps instances as far
// leafward as their declared MIPS demand allows.

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "fogstream/app.hpp"
#include "fogstream/topology.hpp"
#include "fogstream/types.hpp"

namespace fogstream {

struct Instance {
    std::string id;       // "<op>" (Global) or "<op>@<gateway>" (PerGateway)
    std::string op_id;
    std::string gateway;  // empty for Global
};

inline std::string instance_id(const std::string& op, const std::string& gateway) {
    return gateway.empty() ? op : op + "@" + gateway;
}

// PerGateway operators expand to one instance per gateway; Global to one.
// Order: app topological order, gateways ascending within an operator.
inline std::vector<Instance> expand_instances(const AppModel& app, const Topology& topo) {
    std::vector<Instance> out;
    for (const auto& op_id : app.topo_order()) {
        const OperatorSpec& op = app.op(op_id);
        if (op.scope == OpScope::PerGateway) {
            for (const auto& g : topo.gateway_ids())
                out.push_back({instance_id(op_id, g), op_id, g});
        } else {
            out.push_back({op_id, op_id, ""});
        }
    }
    return out;
}

struct Placement {
    std::string policy;
    std::vector<Instance> instances;
    std::map<std::string, std::string> assignments;  // instance id -> device id

    const std::string& device_of(const std::string& instance) const {
        auto it = assignments.find(instance);
        if (it == assignments.end())
            raise("Unassigned", "instance '" + instance + "' has no device");
        return it->second;
    }
};

struct PlacementViolation {
    std::string code;     // CapacityExceeded | OffPath | Unassigned | UnknownDevice
    std::string subject;  // device or instance id
    std::string detail;
};

inline Placement place_cloud(const AppModel& app, const Topology& topo) {
    Placement p;
    p.policy = "cloud";
    p.instances = expand_instances(app, topo);
    Mips total = 0.0;
    for (const auto& inst : p.instances)
        total += app.op(inst.op_id).mips_demand;
    const Device& cloud = topo.device(topo.cloud_id());
    if (total > cloud.cpu_capacity)
        raise("InsufficientCapacity",
              "cloud '" + cloud.id + "' capacity " + std::to_string(cloud.cpu_capacity) +
                  " < total demand " + std::to_string(total));
    for (const auto& inst : p.instances)
        p.assignments[inst.id] = cloud.id;
    return p;
}

inline Placement place_edgeward(const AppModel& app, const Topology& topo) {
    Placement p;
    p.policy = "edgeward";
    p.instances = expand_instances(app, topo);
    std::map<std::string, Mips> residual;
    for (const auto& d : topo.devices())
        residual[d.id] = d.cpu_capacity;

    auto first_fit = [&](const std::vector<std::string>& path, Mips demand) -> std::string {
        for (const auto& dev : path)
            if (residual[dev] >= demand)
                return dev;
        return "";
    };

    // Gateways ascending; that gateway's PerGateway instances in topo order;
    // each claims the first leaf-to-root device with enough residual.
    for (const auto& g : topo.gateway_ids()) {
        std::vector<std::string> path = topo.root_path(g);
        for (const auto& op_id : app.topo_order()) {
            const OperatorSpec& op = app.op(op_id);
            if (op.scope != OpScope::PerGateway)
                continue;
            std::string dev = first_fit(path, op.mips_demand);
            if (dev.empty())
                raise("InsufficientCapacity", "no device on path of gateway '" + g +
                                                  "' can host '" + instance_id(op_id, g) + "'");
            residual[dev] -= op.mips_demand;
            p.assignments[instance_id(op_id, g)] = dev;
        }
    }
    // Globals in topo order, at the lowest ancestor-or-self of all hosts of
    // their predecessor instances; with no predecessors, at the cloud.
    for (const auto& op_id : app.topo_order()) {
        const OperatorSpec& op = app.op(op_id);
        if (op.scope != OpScope::Global)
            continue;
        std::vector<std::string> pred_hosts;
        for (const auto& up : app.upstream(op_id)) {
            const OperatorSpec& up_op = app.op(up);
            if (up_op.scope == OpScope::PerGateway) {
                for (const auto& g : topo.gateway_ids())
                    pred_hosts.push_back(p.device_of(instance_id(up, g)));
            } else {
                pred_hosts.push_back(p.device_of(up));
            }
        }
        std::string start =
            pred_hosts.empty() ? topo.cloud_id() : topo.lowest_common_ancestor(pred_hosts);
        std::string dev = first_fit(topo.root_path(start), op.mips_demand);
        if (dev.empty())
            raise("InsufficientCapacity",
                  "no device from '" + start + "' to the cloud can host '" + op_id + "'");
        residual[dev] -= op.mips_demand;
        p.assignments[op_id] = dev;
    }
    return p;
}

inline Placement place(const std::string& policy, const AppModel& app, const Topology& topo) {
    if (policy == "cloud")
        return place_cloud(app, topo);
    if (policy == "edgeward")
        return place_edgeward(app, topo);
    raise("UnknownPolicy", "policy must be 'cloud' or 'edgeward', got '" + policy + "'");
}

inline std::vector<PlacementViolation> validate_placement(const Placement& p,
                                                          const AppModel& app,
                                                          const Topology& topo) {
    std::vector<PlacementViolation> out;
    std::map<std::string, Mips> used;
    for (const auto& inst : p.instances) {
        auto it = p.assignments.find(inst.id);
        if (it == p.assignments.end()) {
            out.push_back({"Unassigned", inst.id, "instance has no device"});
            continue;
        }
        if (!topo.has_device(it->second)) {
            out.push_back({"UnknownDevice", inst.id, "assigned to '" + it->second + "'"});
            continue;
        }
        used[it->second] += app.op(inst.op_id).mips_demand;
        if (!inst.gateway.empty()) {
            std::vector<std::string> path = topo.root_path(inst.gateway);
            if (std::find(path.begin(), path.end(), it->second) == path.end())
                out.push_back({"OffPath", inst.id,
                               "device '" + it->second + "' is not on the root path of '" +
                                   inst.gateway + "'"});
        }
    }
    for (const auto& [dev, demand] : used) {
        Mips cap = topo.device(dev).cpu_capacity;
        if (demand > cap)
            out.push_back({"CapacityExceeded", dev,
                           "demand " + std::to_string(demand) + " > capacity " +
                               std::to_string(cap)});
    }
    return out;
}

struct PlacementReport {
    std::string policy;
    std::map<std::string, Mips> residual_mips;       // per device
    std::map<std::string, int> instance_level;       // per instance id
    std::map<std::string, std::string> assignments;  // instance id -> device
};

inline PlacementReport placement_report(const Placement& p, const AppModel& app,
                                        const Topology& topo) {
    PlacementReport r;
    r.policy = p.policy;
    for (const auto& d : topo.devices())
        r.residual_mips[d.id] = d.cpu_capacity;
    for (const auto& inst : p.instances) {
        const std::string& dev = p.device_of(inst.id);
        r.residual_mips[dev] -= app.op(inst.op_id).mips_demand;
        r.instance_level[inst.id] = topo.device(dev).level;
        r.assignments[inst.id] = dev;
    }
    return r;
}

}  // namespace fogstream
