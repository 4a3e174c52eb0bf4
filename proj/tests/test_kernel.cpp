#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "fogstream/kernel.hpp"

using fogstream::Error;
using fogstream::EventKind;
using fogstream::EventQueue;
using fogstream::KernelStats;

namespace {
struct Tag {
    int v = 0;
};
using Queue = EventQueue<Tag>;

std::vector<std::pair<double, std::uint64_t>> drain(Queue& q, double horizon) {
    std::vector<std::pair<double, std::uint64_t>> seen;
    q.run_until(horizon, [&](const Queue::Event& e) { seen.emplace_back(e.fire_at, e.seq); });
    return seen;
}
}  // namespace

TEST_CASE("scheduling at the current clock is accepted", "[kernel]") {
    Queue q;
    q.schedule(5.0, EventKind::TupleEmit);
    bool fired_followup = false;
    q.run_until(10.0, [&](const Queue::Event& e) {
        if (e.fire_at == 5.0 && e.kind == EventKind::TupleEmit)
            q.schedule(5.0, EventKind::SimEnd);  // fire_at == now
        else
            fired_followup = true;
    });
    CHECK(fired_followup);
}

TEST_CASE("scheduling into the past raises PastEvent", "[kernel]") {
    Queue q;
    q.schedule(5.0, EventKind::TupleEmit);
    bool raised = false;
    q.run_until(10.0, [&](const Queue::Event&) {
        try {
            q.schedule(4.0, EventKind::SimEnd);
        } catch (const Error& e) {
            raised = e.code() == "PastEvent";
        }
    });
    CHECK(raised);
}

TEST_CASE("equal fire times dequeue in scheduling order", "[kernel]") {
    Queue q;
    std::uint64_t a = q.schedule(7.0, EventKind::TupleEmit);
    std::uint64_t b = q.schedule(7.0, EventKind::TupleEmit);
    REQUIRE(a < b);
    auto seen = drain(q, 10.0);
    REQUIRE(seen.size() == 2);
    CHECK(seen[0].second == a);
    CHECK(seen[1].second == b);
}

TEST_CASE("ordering is by time first, then sequence", "[kernel]") {
    Queue q;
    for (int i = 0; i < 5; ++i)
        q.schedule(100.0, EventKind::SimEnd);  // filler seqs 0..4, beyond horizon
    q.schedule(2.0, EventKind::TupleEmit);     // seq 5
    q.schedule(2.0, EventKind::TupleEmit);     // seq 6
    q.schedule(1.0, EventKind::TupleEmit);     // seq 7
    auto seen = drain(q, 50.0);
    REQUIRE(seen.size() == 3);
    CHECK(seen[0] == std::make_pair(1.0, std::uint64_t{7}));
    CHECK(seen[1] == std::make_pair(2.0, std::uint64_t{5}));
    CHECK(seen[2] == std::make_pair(2.0, std::uint64_t{6}));
}

TEST_CASE("empty queue processes nothing and leaves the clock at zero", "[kernel]") {
    Queue q;
    KernelStats s = q.run_until(1000.0, [](const Queue::Event&) {});
    CHECK(s.events_processed == 0);
    CHECK(s.clock == 0.0);
}

TEST_CASE("the horizon cuts pending events", "[kernel]") {
    Queue q;
    q.schedule(1.0, EventKind::TupleEmit);
    q.schedule(2.0, EventKind::TupleEmit);
    q.schedule(3.0, EventKind::TupleEmit);
    KernelStats s = q.run_until(2.0, [](const Queue::Event&) {});
    CHECK(s.events_processed == 2);
    CHECK(s.clock == 2.0);
    CHECK(q.pending() == 1);
}

TEST_CASE("with no events beyond it the clock ends at the last event", "[kernel]") {
    Queue q;
    q.schedule(1.0, EventKind::TupleEmit);
    q.schedule(4.5, EventKind::TupleEmit);
    KernelStats s = q.run_until(1000.0, [](const Queue::Event&) {});
    CHECK(s.events_processed == 2);
    CHECK(s.clock == 4.5);
}

TEST_CASE("processed-event times never decrease", "[kernel]") {
    Queue q;
    // a scrambled batch plus cascaded scheduling from inside the handler
    double ts[] = {9.5, 0.25, 3.0, 3.0, 7.75, 1.5, 3.0, 8.0};
    for (double t : ts)
        q.schedule(t, EventKind::TupleEmit, {1});
    q.run_until(20.0, [&](const Queue::Event& e) {
        if (e.payload.v == 1 && e.fire_at < 10.0)
            q.schedule(e.fire_at + 0.5, EventKind::TupleEmit, {2});
    });
    Queue q2;
    double last = 0.0;
    bool monotone = true;
    for (double t : ts)
        q2.schedule(t, EventKind::TupleEmit, {1});
    q2.run_until(20.0, [&](const Queue::Event& e) {
        monotone = monotone && e.fire_at >= last;
        last = e.fire_at;
        if (e.payload.v == 1 && e.fire_at < 10.0)
            q2.schedule(e.fire_at + 0.5, EventKind::TupleEmit, {2});
    });
    CHECK(monotone);
}

TEST_CASE("two identical runs process identical event sequences", "[kernel]") {
    auto run = [] {
        Queue q;
        for (int i = 0; i < 50; ++i)
            q.schedule(static_cast<double>((i * 37) % 11), EventKind::TupleEmit, {i});
        std::vector<std::pair<double, std::uint64_t>> seen;
        q.run_until(100.0, [&](const Queue::Event& e) {
            seen.emplace_back(e.fire_at, e.seq);
            if (e.seq % 7 == 0)
                q.schedule(e.fire_at + 1.0, EventKind::SimEnd);
        });
        return seen;
    };
    CHECK(run() == run());
}

TEST_CASE("remaining exposes unprocessed events for audits", "[kernel]") {
    Queue q;
    q.schedule(1.0, EventKind::TupleEmit);
    q.schedule(5.0, EventKind::TransferComplete);
    q.schedule(6.0, EventKind::ProcessingComplete);
    q.run_until(2.0, [](const Queue::Event&) {});
    REQUIRE(q.remaining().size() == 2);
    int transfers = 0, processing = 0;
    for (const auto& e : q.remaining()) {
        transfers += e.kind == EventKind::TransferComplete;
        processing += e.kind == EventKind::ProcessingComplete;
    }
    CHECK(transfers == 1);
    CHECK(processing == 1);
}
