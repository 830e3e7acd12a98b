#include "lobkit/tape.hpp"

#include <algorithm>
#include <stdexcept>

namespace lobkit {

namespace {

void set_quotes(TapeEntry& e, const QuoteSnapshot& q) {
    e.bid = q.bid ? q.bid->value : 0;
    e.ask = q.ask ? q.ask->value : 0;
    e.bid_volume = q.bid_volume;
    e.ask_volume = q.ask_volume;
}

}  // namespace

void FlowTape::push(const ReplayStep& step) {
    if (entries.empty()) set_quotes(initial, step.before);
    TapeEntry e;
    e.time = step.event.time.ns;
    e.price = step.event.price.value;
    e.delta = step.event.delta;
    e.order_id = step.event.order_id;
    e.kind = step.event.kind;
    e.side = step.event.side;
    set_quotes(e, step.after);
    entries.push_back(e);
}

FlowTape build_tape(std::span<const RawMessage> messages, Price tick) {
    FlowTape tape;
    tape.entries.reserve(messages.size());
    Book book(tick);
    Replayer replayer(book);
    for (const RawMessage& m : messages) {
        if (auto step = replayer.apply(m)) tape.push(*step);
    }
    tape.halts = replayer.halts();
    tape.messages = messages.size();
    return tape;
}

FlowTape build_tape(MessageReader& reader, Price tick) {
    FlowTape tape;
    Book book(tick);
    Replayer replayer(book);
    RawMessage m;
    while (reader.next(m)) {
        if (auto step = replayer.apply(m)) tape.push(*step);
    }
    tape.halts = replayer.halts();
    tape.messages = replayer.applied();
    return tape;
}

double VolumeIntegral::mean() const {
    if (duration_ns == 0) {
        throw std::domain_error("no quoted time in the window; the volume basis is undefined");
    }
    return static_cast<double>(static_cast<long double>(volume_ns) /
                               static_cast<long double>(duration_ns));
}

VolumeIntegral integrate_best_volume(const FlowTape& tape, Timestamp start, Timestamp end) {
    VolumeIntegral out;
    if (end <= start) return out;
    // State in force at `start`: after every entry stamped <= start.
    const auto& es = tape.entries;
    const auto first_after = std::upper_bound(
        es.begin(), es.end(), start.ns,
        [](std::int64_t t, const TapeEntry& e) { return t < e.time; });
    std::size_t i = static_cast<std::size_t>(first_after - es.begin());
    const TapeEntry* state = i == 0 ? &tape.initial : &es[i - 1];
    std::int64_t from = start.ns;
    auto accumulate = [&](std::int64_t to) {
        const auto dt = static_cast<Uint128>(to - from);
        for (Side s : {Side::Buy, Side::Sell}) {
            if (state->best(s) == 0) continue;
            out.volume_ns += dt * static_cast<Uint128>(state->volume(s));
            out.duration_ns += dt;
        }
    };
    while (i < es.size() && es[i].time < end.ns) {
        const std::int64_t t = es[i].time;
        accumulate(t);
        while (i < es.size() && es[i].time == t) ++i;
        state = &es[i - 1];
        from = t;
    }
    accumulate(end.ns);
    return out;
}

}  // namespace lobkit
