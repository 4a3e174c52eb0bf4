#pragma once
// Tree of fog devices: cloud at the root (level 0), gateways at the leaves.
// Immutable after build; routing follows the unique tree path through the LCA.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fogstream/types.hpp"

namespace fogstream {

struct Device {
    std::string id;
    Mips cpu_capacity = 0.0;
    std::optional<std::string> parent;  // absent for the root
    Bytes uplink_bandwidth = 0.0;       // bytes per ms, toward parent
    SimTime uplink_latency = 0.0;       // ms, toward parent
    int level = 0;                      // derived: 0 at the root
};

struct SensorAttachment {
    std::string sensor_id;
    std::string gateway_id;
    SimTime latency_ms = 0.0;  // sensor-to-gateway hop, latency only
};

inline SimTime link_transfer_time(SimTime latency, Bytes bandwidth, Bytes size) {
    if (bandwidth <= 0.0)
        raise("NonPositiveBandwidth", "bandwidth must be > 0");
    if (size < 0.0)
        raise("NegativeSize", "tuple size must be >= 0");
    return latency + size / bandwidth;
}

class Topology {
public:
    static Topology build(std::vector<Device> devices) {
        if (devices.empty())
            raise("NotATree", "topology has no devices");
        Topology t;
        std::sort(devices.begin(), devices.end(),
                  [](const Device& a, const Device& b) { return a.id < b.id; });
        for (auto& d : devices) {
            if (t.index_.count(d.id))
                raise("NotATree", "duplicate device id '" + d.id + "'");
            if (d.cpu_capacity <= 0.0)
                raise("NonPositiveCapacity", "device '" + d.id + "' has cpu_capacity <= 0");
            t.index_[d.id] = t.devices_.size();
            t.devices_.push_back(std::move(d));
        }
        std::string root;
        for (const auto& d : t.devices_) {
            if (!d.parent) {
                if (!root.empty())
                    raise("NotATree", "multiple roots: '" + root + "' and '" + d.id + "'");
                root = d.id;
            } else {
                if (*d.parent == d.id)
                    raise("NotATree", "device '" + d.id + "' is its own parent");
                if (!t.index_.count(*d.parent))
                    raise("DanglingParent",
                          "device '" + d.id + "' names unknown parent '" + *d.parent + "'");
                if (d.uplink_bandwidth <= 0.0)
                    raise("NonPositiveBandwidth",
                          "device '" + d.id + "' has uplink_bandwidth <= 0");
                if (d.uplink_latency < 0.0)
                    raise("NegativeLatency", "device '" + d.id + "' has uplink_latency < 0");
            }
        }
        if (root.empty())
            raise("NotATree", "no root device (every device has a parent)");
        t.cloud_id_ = root;
        // Levels via parent-chain walk; a chain longer than the device count is a cycle.
        for (auto& d : t.devices_) {
            std::size_t hops = 0;
            const Device* cur = &d;
            while (cur->parent) {
                if (++hops > t.devices_.size())
                    raise("NotATree", "cycle through device '" + d.id + "'");
                cur = &t.devices_[t.index_.at(*cur->parent)];
            }
            d.level = static_cast<int>(hops);
        }
        std::map<std::string, bool> has_child;
        for (const auto& d : t.devices_)
            if (d.parent)
                has_child[*d.parent] = true;
        for (const auto& d : t.devices_)
            if (!has_child.count(d.id))
                t.gateway_ids_.push_back(d.id);  // already ascending: devices_ is sorted
        return t;
    }

    const Device& device(const std::string& id) const {
        auto it = index_.find(id);
        if (it == index_.end())
            raise("UnknownDevice", "no device '" + id + "'");
        return devices_[it->second];
    }

    bool has_device(const std::string& id) const { return index_.count(id) != 0; }
    const std::vector<Device>& devices() const noexcept { return devices_; }
    const std::string& cloud_id() const noexcept { return cloud_id_; }
    const std::vector<std::string>& gateway_ids() const noexcept { return gateway_ids_; }

    // Device ids from id up to the root, inclusive.
    std::vector<std::string> root_path(const std::string& id) const {
        std::vector<std::string> path;
        const Device* cur = &device(id);
        path.push_back(cur->id);
        while (cur->parent) {
            cur = &device(*cur->parent);
            path.push_back(cur->id);
        }
        return path;
    }

    // Unique tree path from -> ... -> LCA -> ... -> to; route(a, a) = [a].
    std::vector<std::string> route(const std::string& from, const std::string& to) const {
        std::vector<std::string> up = root_path(from);
        std::vector<std::string> down = root_path(to);
        std::size_t i = up.size();
        std::size_t j = down.size();
        while (i > 0 && j > 0 && up[i - 1] == down[j - 1]) {
            --i;
            --j;
        }
        // up[0..i] ends at the LCA (position i); down[0..j-1] is the far side.
        std::vector<std::string> path(up.begin(), up.begin() + static_cast<long>(i) + 1);
        for (std::size_t k = j; k-- > 0;)
            path.push_back(down[k]);
        return path;
    }

    // LCA of a nonempty set of device ids.
    std::string lowest_common_ancestor(const std::vector<std::string>& ids) const {
        if (ids.empty())
            raise("UnknownDevice", "LCA of empty device set");
        std::vector<std::string> common = root_path(ids[0]);
        for (std::size_t n = 1; n < ids.size(); ++n) {
            std::vector<std::string> other = root_path(ids[n]);
            std::size_t i = common.size();
            std::size_t j = other.size();
            std::size_t shared = 0;
            while (i > 0 && j > 0 && common[i - 1] == other[j - 1]) {
                --i;
                --j;
                ++shared;
            }
            common.erase(common.begin(), common.end() - static_cast<long>(shared));
        }
        if (common.empty())
            raise("NotATree", "devices share no ancestor");
        return common.front();
    }

    // An edge is named by its child endpoint (the uplink owner).
    bool edge_touches_root(const std::string& child_id) const {
        const Device& d = device(child_id);
        return d.parent && *d.parent == cloud_id_;
    }

private:
    std::vector<Device> devices_;
    std::map<std::string, std::size_t> index_;
    std::string cloud_id_;
    std::vector<std::string> gateway_ids_;
};

}  // namespace fogstream
