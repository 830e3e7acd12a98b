#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "lobkit/book.hpp"
#include "lobkit/messages.hpp"
#include "lobkit/replay.hpp"
#include "lobkit/rng.hpp"

namespace lobkit {

/// One visible book change with the best quotes left behind by it. Absent
/// quote prices are stored as 0.
struct TapeEntry {
    std::int64_t time{0};
    std::int64_t price{0};
    std::int64_t delta{0};
    OrderId order_id{0};
    std::int64_t bid{0};
    std::int64_t ask{0};
    std::int64_t bid_volume{0};
    std::int64_t ask_volume{0};
    BookEventKind kind{BookEventKind::LimitArrival};
    Side side{Side::Buy};

    std::int64_t best(Side s) const { return s == Side::Buy ? bid : ask; }
    std::int64_t volume(Side s) const { return s == Side::Buy ? bid_volume : ask_volume; }
};

/// Replayed day in the compact form the event study works on.
struct FlowTape {
    std::vector<TapeEntry> entries;
    TapeEntry initial;  ///< quotes before the first entry; other fields unused
    std::vector<Timestamp> halts;
    std::size_t messages{0};

    std::size_t size() const { return entries.size(); }
    /// Quotes in force just before entry i.
    const TapeEntry& before(std::size_t i) const { return i == 0 ? initial : entries[i - 1]; }

    void push(const ReplayStep& step);
};

/// Replays messages onto an empty book and records the tape.
FlowTape build_tape(std::span<const RawMessage> messages, Price tick = kDefaultTick);

/// Streaming form; memory grows with the tape, not the text.
FlowTape build_tape(MessageReader& reader, Price tick = kDefaultTick);

/// Exact time integral of best-queue volume over a window, summed over both
/// sides. Only time during which a side has a quote counts towards that
/// side's duration.
struct VolumeIntegral {
    Uint128 volume_ns{0};
    Uint128 duration_ns{0};

    void merge(const VolumeIntegral& o) {
        volume_ns += o.volume_ns;
        duration_ns += o.duration_ns;
    }
    /// Time-weighted mean volume at the best quotes; throws if no side was
    /// ever quoted in the window.
    double mean() const;
};

/// Integrates V^B and V^A over [start, end) with the book state at time t
/// taken after every entry stamped <= t.
VolumeIntegral integrate_best_volume(const FlowTape& tape, Timestamp start, Timestamp end);

}  // namespace lobkit
