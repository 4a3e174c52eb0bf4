#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <random>

#include "fogstream/placement.hpp"
#include "test_support.hpp"

using namespace fogstream;

namespace {
std::string code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return "";
}

AppModel incident_app(Mips avg = 600, Mips cong = 600, Mips inc = 800) {
    return tsup::chain_app({tsup::window_op("avg_speed", 5000, 100, 200, avg),
                            tsup::map_op("congestion", 100, 200, cong),
                            tsup::map_op("incident", 50, 100, inc, OpScope::Global)},
                           {"s1"});
}
}  // namespace

TEST_CASE("cloud policy puts every instance on the root", "[placement]") {
    Topology topo = tsup::tree_topology(20000);
    AppModel app = incident_app();
    Placement p = place_cloud(app, topo);
    REQUIRE(p.instances.size() == 9);  // 2 per-gateway ops x 4 gateways + 1 global
    for (const auto& inst : p.instances)
        CHECK(p.device_of(inst.id) == "cloud");
    CHECK(validate_placement(p, app, topo).empty());
}

TEST_CASE("cloud policy fails when total demand exceeds the root", "[placement]") {
    Topology topo = tsup::tree_topology(100);
    AppModel app = incident_app();
    CHECK(code_of([&] { place_cloud(app, topo); }) == "InsufficientCapacity");
}

TEST_CASE("an empty application yields an empty assignment", "[placement]") {
    Topology topo = tsup::tree_topology();
    AppModel app;  // no operators
    Placement p = place_cloud(app, topo);
    CHECK(p.instances.empty());
    CHECK(p.assignments.empty());
}

TEST_CASE("edgeward keeps instances at the gateway while capacity lasts", "[placement]") {
    Topology topo = tsup::tree_topology(20000, 4000, 4000);
    AppModel app = incident_app(600, 600, 800);
    Placement p = place_edgeward(app, topo);
    for (const auto& g : topo.gateway_ids()) {
        CHECK(p.device_of("avg_speed@" + g) == g);
        CHECK(p.device_of("congestion@" + g) == g);
    }
    // incident's predecessors sit on all four gateways -> LCA is the root
    CHECK(p.device_of("incident") == "cloud");
    CHECK(validate_placement(p, app, topo).empty());
}

TEST_CASE("a full gateway pushes the next instance to the first free ancestor", "[placement]") {
    // gateway fits 1000; avg_speed 600 stays, congestion 600 climbs to int_*
    Topology topo = tsup::tree_topology(20000, 4000, 1000);
    AppModel app = incident_app(600, 600, 800);
    Placement p = place_edgeward(app, topo);
    CHECK(p.device_of("avg_speed@gw_a1") == "gw_a1");
    CHECK(p.device_of("congestion@gw_a1") == "int_a");
    CHECK(p.device_of("congestion@gw_b2") == "int_b");
    CHECK(validate_placement(p, app, topo).empty());
}

TEST_CASE("starved fog layers degenerate edgeward into the cloud policy", "[placement]") {
    // near-zero capacity below the root: nothing fits before the cloud
    Topology topo = tsup::tree_topology(20000, 1e-6, 1e-6);
    AppModel app = incident_app();
    Placement fog = place_edgeward(app, topo);
    Placement cloud = place_cloud(app, topo);
    CHECK(fog.assignments == cloud.assignments);
}

TEST_CASE("a global operator lands on the LCA of its feeders when it fits", "[placement]") {
    // keep all per-gateway work under int_a's subtree by only having a-side demand
    std::vector<Device> d;
    d.push_back({"cloud", 20000, {}, 0, 0, 0});
    d.push_back({"int_a", 4000, "cloud", 500, 60, 0});
    d.push_back({"gw_a1", 2000, "int_a", 500, 5, 0});
    d.push_back({"gw_a2", 2000, "int_a", 500, 5, 0});
    Topology topo = Topology::build(std::move(d));
    AppModel app = tsup::chain_app({tsup::map_op("local", 10, 10, 500),
                                    tsup::map_op("merge", 10, 10, 700, OpScope::Global)},
                                   {"s1"});
    Placement p = place_edgeward(app, topo);
    CHECK(p.device_of("local@gw_a1") == "gw_a1");
    CHECK(p.device_of("local@gw_a2") == "gw_a2");
    CHECK(p.device_of("merge") == "int_a");
}

TEST_CASE("a global operator with no operator predecessors pins to the cloud", "[placement]") {
    Topology topo = tsup::tree_topology();
    AppModel app = tsup::chain_app({tsup::map_op("only", 10, 10, 500, OpScope::Global)}, {"s1"});
    Placement p = place_edgeward(app, topo);
    CHECK(p.device_of("only") == "cloud");
}

TEST_CASE("edgeward fails only when even the cloud cannot host", "[placement]") {
    Topology topo = tsup::tree_topology(1000, 1e-6, 1e-6);
    AppModel app = incident_app(600, 600, 800);  // 9 instances, way over 1000
    CHECK(code_of([&] { place_edgeward(app, topo); }) == "InsufficientCapacity");
}

TEST_CASE("validate_placement reports each violation kind", "[placement]") {
    Topology topo = tsup::tree_topology(20000, 4000, 1000);
    AppModel app = incident_app(600, 600, 800);

    Placement over = place_cloud(app, topo);
    for (auto& [inst, dev] : over.assignments)
        dev = "gw_a1";  // 9 instances on a 1000 MIPS gateway, some off-path
    auto violations = validate_placement(over, app, topo);
    bool capacity = false, offpath = false;
    for (const auto& v : violations) {
        capacity = capacity || v.code == "CapacityExceeded";
        offpath = offpath || v.code == "OffPath";
    }
    CHECK(capacity);
    CHECK(offpath);

    Placement missing = place_cloud(app, topo);
    missing.assignments.erase("incident");
    violations = validate_placement(missing, app, topo);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].code == "Unassigned");

    Placement ghost = place_cloud(app, topo);
    ghost.assignments["incident"] = "nowhere";
    violations = validate_placement(ghost, app, topo);
    REQUIRE(violations.size() == 1);
    CHECK(violations[0].code == "UnknownDevice");
}

TEST_CASE("policies are deterministic functions of app and topology", "[placement]") {
    Topology topo = tsup::tree_topology(20000, 4000, 1000);
    AppModel app = incident_app(600, 600, 800);
    CHECK(place_edgeward(app, topo).assignments == place_edgeward(app, topo).assignments);
    CHECK(place_cloud(app, topo).assignments == place_cloud(app, topo).assignments);
}

TEST_CASE("the greedy walk is reproducible by an independent replay", "[placement]") {
    std::mt19937_64 gen(4242);
    for (int trial = 0; trial < 50; ++trial) {
        Mips gw_cap = 500 + static_cast<Mips>(gen() % 2000);
        Mips mid_cap = 500 + static_cast<Mips>(gen() % 2000);
        Mips d1 = 100 + static_cast<Mips>(gen() % 900);
        Mips d2 = 100 + static_cast<Mips>(gen() % 900);
        Mips d3 = 100 + static_cast<Mips>(gen() % 900);
        Topology topo = tsup::tree_topology(50000, mid_cap, gw_cap);
        AppModel app = incident_app(d1, d2, d3);
        Placement p = place_edgeward(app, topo);
        REQUIRE(validate_placement(p, app, topo).empty());

        // replay: same greedy, written independently of the implementation
        std::map<std::string, Mips> residual;
        for (const auto& dev : topo.devices())
            residual[dev.id] = dev.cpu_capacity;
        for (const auto& g : topo.gateway_ids()) {
            for (const auto& op_id : {"avg_speed", "congestion"}) {
                Mips need = app.op(op_id).mips_demand;
                std::string chosen;
                for (const auto& dev : topo.root_path(g))
                    if (residual[dev] >= need) {
                        chosen = dev;
                        break;
                    }
                REQUIRE(!chosen.empty());
                residual[chosen] -= need;
                REQUIRE(p.device_of(std::string(op_id) + "@" + g) == chosen);
            }
        }
    }
}

TEST_CASE("placement reports expose residuals and levels", "[placement]") {
    Topology topo = tsup::tree_topology(20000, 4000, 4000);
    AppModel app = incident_app(600, 600, 800);
    Placement p = place_edgeward(app, topo);
    PlacementReport r = placement_report(p, app, topo);
    CHECK(r.policy == "edgeward");
    CHECK(r.residual_mips.at("gw_a1") == 4000 - 1200);
    CHECK(r.residual_mips.at("cloud") == 20000 - 800);
    CHECK(r.instance_level.at("avg_speed@gw_a1") == 2);
    CHECK(r.instance_level.at("incident") == 0);
    for (const auto& [dev, mips] : r.residual_mips)
        CHECK(mips >= 0);
}
