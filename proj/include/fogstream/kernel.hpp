#pragma once
// Deterministic discrete-event core: simulated clock and a priority event
// queue ordered by (fire time, scheduling sequence number).

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "fogstream/types.hpp"

namespace fogstream {

enum class EventKind {
    TupleEmit,
    TupleArrival,
    ProcessingComplete,
    TransferComplete,
    SimEnd,
};

inline const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::TupleEmit: return "TupleEmit";
        case EventKind::TupleArrival: return "TupleArrival";
        case EventKind::ProcessingComplete: return "ProcessingComplete";
        case EventKind::TransferComplete: return "TransferComplete";
        case EventKind::SimEnd: return "SimEnd";
    }
    return "?";
}

struct KernelStats {
    std::uint64_t events_processed = 0;
    SimTime clock = 0.0;
};

// Min-heap event queue. Ties in fire time break on the sequence number
// assigned at scheduling, which makes the processing order a total order.
template <typename Payload>
class EventQueue {
public:
    struct Event {
        SimTime fire_at = 0.0;
        std::uint64_t seq = 0;
        EventKind kind = EventKind::SimEnd;
        Payload payload{};
    };

    using Handler = std::function<void(const Event&)>;

    SimTime clock() const noexcept { return clock_; }
    std::size_t pending() const noexcept { return heap_.size(); }
    std::uint64_t next_seq() const noexcept { return next_seq_; }

    // Returns the scheduled event's sequence number as its handle.
    std::uint64_t schedule(SimTime fire_at, EventKind kind, Payload payload = {}) {
        if (fire_at < clock_)
            raise("PastEvent", "event at t=" + std::to_string(fire_at) +
                                   " scheduled after clock t=" + std::to_string(clock_));
        Event e{fire_at, next_seq_++, kind, std::move(payload)};
        heap_.push_back(std::move(e));
        std::push_heap(heap_.begin(), heap_.end(), Later{});
        return heap_.back().seq;
    }

    // Processes events in (fire_at, seq) order until the queue drains or the
    // next event lies beyond the horizon. The clock never decreases; it ends
    // at the horizon when events remain, else at the last processed time.
    KernelStats run_until(SimTime horizon, const Handler& handler) {
        KernelStats stats;
        while (!heap_.empty() && heap_.front().fire_at <= horizon) {
            std::pop_heap(heap_.begin(), heap_.end(), Later{});
            Event e = std::move(heap_.back());
            heap_.pop_back();
            clock_ = e.fire_at;
            handler(e);
            ++stats.events_processed;
        }
        if (!heap_.empty())
            clock_ = std::max(clock_, horizon);
        stats.clock = clock_;
        return stats;
    }

    // Unprocessed events, for end-of-run audits. Heap order, not fire order.
    const std::vector<Event>& remaining() const noexcept { return heap_; }

private:
    struct Later {
        bool operator()(const Event& a, const Event& b) const {
            if (a.fire_at != b.fire_at)
                return a.fire_at > b.fire_at;
            return a.seq > b.seq;
        }
    };

    std::vector<Event> heap_;
    SimTime clock_ = 0.0;
    std::uint64_t next_seq_ = 0;
};

}  // namespace fogstream
