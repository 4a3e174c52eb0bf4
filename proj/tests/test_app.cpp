#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>

#include "fogstream/app.hpp"
#include "fogstream/random.hpp"
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

AppSpec incident_chain() {
    AppSpec s;
    s.operators = {tsup::window_op("avg_speed", 5000, 100, 200, 1000),
                   tsup::map_op("congestion", 100, 200, 1000),
                   tsup::map_op("incident", 50, 100, 1500, OpScope::Global)};
    s.edges = {{"avg_speed", "congestion"}, {"congestion", "incident"}, {"incident", kSinkId}};
    s.sources = {{"s1", "avg_speed"}};
    return s;
}
}  // namespace

TEST_CASE("the sensing-to-incident chain validates with its listed order", "[app]") {
    AppModel app = AppModel::validate(incident_chain());
    CHECK(app.topo_order() ==
          std::vector<std::string>{"avg_speed", "congestion", "incident"});
    CHECK(app.feeds_sink("incident"));
    CHECK_FALSE(app.feeds_sink("avg_speed"));
    CHECK(app.entry_operator("s1") == "avg_speed");
    CHECK(app.downstream("avg_speed") == std::vector<std::string>{"congestion"});
    CHECK(app.upstream("incident") == std::vector<std::string>{"congestion"});
}

TEST_CASE("bad graphs are rejected with the offending construct named", "[app]") {
    auto self_edge = incident_chain();
    self_edge.edges.push_back({"congestion", "congestion"});
    CHECK(code_of([&] { AppModel::validate(self_edge); }) == "CyclicGraph");

    auto cycle = incident_chain();
    cycle.edges.push_back({"congestion", "avg_speed"});
    try {
        AppModel::validate(cycle);
        FAIL("expected CyclicGraph");
    } catch (const Error& e) {
        CHECK(e.code() == "CyclicGraph");
        CHECK(std::string(e.what()).find("avg_speed") != std::string::npos);
    }

    auto orphan = incident_chain();
    orphan.operators.push_back(tsup::map_op("stray", 1, 1, 1));
    orphan.edges.push_back({"stray", kSinkId});
    CHECK(code_of([&] { AppModel::validate(orphan); }) == "UnreachableOperator");

    auto no_sink = incident_chain();
    no_sink.edges.pop_back();
    CHECK(code_of([&] { AppModel::validate(no_sink); }) == "MissingSink");

    auto dead_end = incident_chain();
    dead_end.operators.push_back(tsup::map_op("silent", 1, 1, 1));
    dead_end.edges.push_back({"avg_speed", "silent"});
    CHECK(code_of([&] { AppModel::validate(dead_end); }) == "MissingSink");

    auto fan_back = incident_chain();
    fan_back.operators.push_back(tsup::map_op("local", 1, 1, 1, OpScope::PerGateway));
    fan_back.edges.push_back({"incident", "local"});
    fan_back.edges.push_back({"local", kSinkId});
    CHECK(code_of([&] { AppModel::validate(fan_back); }) == "ScopeMismatch");
}

TEST_CASE("operator parameter domains are enforced", "[app]") {
    auto bad_map = incident_chain();
    bad_map.operators[1].selectivity = 0.5;
    CHECK(code_of([&] { AppModel::validate(bad_map); }) == "InvalidOperator");

    auto bad_filter = incident_chain();
    bad_filter.operators[2] = tsup::filter_op("incident", 1.5, 50, 100, 1500, OpScope::Global);
    CHECK(code_of([&] { AppModel::validate(bad_filter); }) == "InvalidOperator");

    auto bad_window = incident_chain();
    bad_window.operators[0].window_ms = 0;
    CHECK(code_of([&] { AppModel::validate(bad_window); }) == "InvalidOperator");

    auto bad_demand = incident_chain();
    bad_demand.operators[0].mips_demand = 0;
    CHECK(code_of([&] { AppModel::validate(bad_demand); }) == "InvalidOperator");
}

TEST_CASE("map passes lineage through and restamps costs", "[app]") {
    OperatorSpec spec = tsup::map_op("m", 70, 300, 10);
    OperatorInstance inst(&spec, "m@gw", "gw");
    RandomStream rng(1);
    Tuple in;
    in.origin_ts = 10.0;
    in.cpu_length = 999;
    in.network_length = 888;
    in.sensor_id = "s1";
    auto outs = inst.process(in, rng.substream("op:m@gw"));
    REQUIRE(outs.size() == 1);
    CHECK(outs[0].origin_ts == 10.0);
    CHECK(outs[0].cpu_length == 70);
    CHECK(outs[0].network_length == 300);
    CHECK(outs[0].sensor_id == "s1");
    CHECK(outs[0].emitted_by == "m@gw");
}

TEST_CASE("a zero-selectivity filter drops everything", "[app]") {
    OperatorSpec spec = tsup::filter_op("f", 0.0, 1, 1, 10);
    OperatorInstance inst(&spec, "f", "");
    RandomStream rng(1);
    Tuple in;
    for (int i = 0; i < 100; ++i)
        CHECK(inst.process(in, rng.substream("op:f")).empty());
    CHECK(inst.dropped() == 100);
}

TEST_CASE("filter output counts follow the law of large numbers", "[app]") {
    const double p = 0.3;
    const int n = 10000;
    OperatorSpec spec = tsup::filter_op("f", p, 1, 1, 10);
    OperatorInstance inst(&spec, "f", "");
    RandomStream rng(77);
    Tuple in;
    int kept = 0;
    for (int i = 0; i < n; ++i)
        kept += inst.process(in, rng.substream("op:f")).empty() ? 0 : 1;
    double sigma = std::sqrt(n * p * (1 - p));
    CHECK(std::abs(kept - n * p) < 5 * sigma);
}

TEST_CASE("windows emit one tuple carrying the latest buffered origin", "[app]") {
    OperatorSpec spec = tsup::window_op("w", 5000, 100, 200, 10);
    OperatorInstance inst(&spec, "w@gw", "gw");
    RandomStream rng(1);
    for (double origin : {100.0, 2300.0, 4900.0}) {
        Tuple in;
        in.origin_ts = origin;
        in.sensor_id = "s1";
        CHECK(inst.process(in, rng.substream("op:w@gw")).empty());
    }
    CHECK(inst.buffered() == 3);
    auto outs = inst.close_window();
    REQUIRE(outs.size() == 1);
    CHECK(outs[0].origin_ts == 4900.0);
    CHECK(outs[0].cpu_length == 100);
    CHECK(outs[0].network_length == 200);
    CHECK(inst.buffered() == 0);
    CHECK(inst.absorbed() == 3);
    CHECK(inst.close_window().empty());  // empty window emits nothing
}

TEST_CASE("expected output rates", "[app]") {
    OperatorSpec half = tsup::filter_op("f", 0.5, 1, 1, 10);
    CHECK(expected_output_rate(half, 10.0) == 5.0);
    OperatorSpec win = tsup::window_op("w", 5000, 1, 1, 10);
    CHECK(expected_output_rate(win, 200.0) == 0.2);
    CHECK(expected_output_rate(win, 0.0) == 0.0);
}

TEST_CASE("window emission count equals elapsed windows minus empty ones", "[app]") {
    // 1 input per 700 ms watched over 10 windows of 1000 ms
    OperatorSpec spec = tsup::window_op("w", 1000, 1, 1, 10);
    OperatorInstance inst(&spec, "w", "");
    RandomStream rng(1);
    int emitted = 0, empty = 0;
    std::size_t next_input = 0;
    std::vector<double> inputs;
    for (double t = 0; t < 10000; t += 700)
        inputs.push_back(t);
    for (int k = 1; k <= 10; ++k) {
        for (; next_input < inputs.size() && inputs[next_input] < k * 1000.0; ++next_input) {
            Tuple in;
            in.origin_ts = inputs[next_input];
            inst.process(in, rng.substream("op:w"));
        }
        auto outs = inst.close_window();
        emitted += static_cast<int>(outs.size());
        empty += outs.empty() ? 1 : 0;
    }
    CHECK(emitted == 10 - empty);
    CHECK(emitted > 0);
}
