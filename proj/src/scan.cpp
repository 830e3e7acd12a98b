#include "lobkit/scan.hpp"

#include <stdexcept>

#include "lobkit/event_study.hpp"

namespace lobkit {

namespace {

bool joins_or_improves(const TapeEntry& e, const TapeEntry& pre) {
    const std::int64_t best = pre.best(e.side);
    if (best == 0) return true;
    return e.side == Side::Buy ? e.price >= best : e.price <= best;
}

void add_spread(ScanSummary& s, const FlowTape& tape, Timestamp start, Timestamp end) {
    const auto& es = tape.entries;
    std::size_t i = 0;
    while (i < es.size() && es[i].time <= start.ns) ++i;
    const TapeEntry* state = i == 0 ? &tape.initial : &es[i - 1];
    std::int64_t from = start.ns;
    auto accumulate = [&](std::int64_t to) {
        if (state->bid == 0 || state->ask == 0) return;
        const auto dt = static_cast<Uint128>(to - from);
        s.spread_area += dt * static_cast<Uint128>(state->ask - state->bid);
        s.spread_duration += dt;
    };
    while (i < es.size() && es[i].time < end.ns) {
        const std::int64_t t = es[i].time;
        accumulate(t);
        while (i < es.size() && es[i].time == t) ++i;
        state = &es[i - 1];
        from = t;
    }
    accumulate(end.ns);
}

std::optional<double> ratio(long double num, long double den, long double scale = 1.0L) {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num / den / scale);
}

}  // namespace

ScanSummary scan_tape(const FlowTape& tape, const DaySession& session) {
    ScanSummary s;
    const auto& es = tape.entries;
    std::size_t in_window = 0;
    for (std::size_t i = 0; i < es.size(); ++i) {
        const TapeEntry& e = es[i];
        if (!session.contains(Timestamp{e.time})) continue;
        ++in_window;
        const TapeEntry& pre = tape.before(i);
        if (e.kind == BookEventKind::LimitArrival) {
            ++s.limit_arrivals;
            if (joins_or_improves(e, pre)) ++s.limit_arrivals_at_best;
        } else if (e.kind == BookEventKind::Cancellation) {
            ++s.cancellations;
            if (e.price == pre.best(e.side)) ++s.cancellations_at_best;
        }
    }
    if (in_window == 0) throw std::invalid_argument("no book events inside the session window");

    for (const MarketOrderEvent& mo : detect_market_orders(tape)) {
        if (!session.contains(mo.t)) continue;
        ++s.market_orders;
        s.market_order_shares += mo.total_shares;
        if (mo.price_maintaining) {
            ++s.price_maintaining;
            s.price_maintaining_shares += mo.total_shares;
        }
        for (const Fill& f : mo.fills) {
            ++s.fills;
            s.notional += static_cast<long double>(f.price.value) * static_cast<long double>(f.shares);
            s.traded_shares += f.shares;
        }
    }
    add_spread(s, tape, session.window_start(), session.window_end());
    s.best_volume = integrate_best_volume(tape, session.window_start(), session.window_end());
    return s;
}


void ScanSummary::merge(const ScanSummary& o) {
    market_orders += o.market_orders;
    price_maintaining += o.price_maintaining;
    limit_arrivals_at_best += o.limit_arrivals_at_best;
    cancellations_at_best += o.cancellations_at_best;
    limit_arrivals += o.limit_arrivals;
    cancellations += o.cancellations;
    fills += o.fills;
    spread_area += o.spread_area;
    spread_duration += o.spread_duration;
    notional += o.notional;
    traded_shares += o.traded_shares;
    market_order_shares += o.market_order_shares;
    price_maintaining_shares += o.price_maintaining_shares;
    best_volume.merge(o.best_volume);
}

std::optional<double> ScanSummary::mean_spread() const {
    return ratio(static_cast<long double>(spread_area), static_cast<long double>(spread_duration),
                 1e4L);
}

std::optional<double> ScanSummary::mean_trade_price() const {
    return ratio(notional, static_cast<long double>(traded_shares), 1e4L);
}

std::optional<double> ScanSummary::mean_best_volume() const {
    if (best_volume.duration_ns == 0) return std::nullopt;
    return best_volume.mean();
}

std::optional<double> ScanSummary::mean_market_order_size() const {
    return ratio(static_cast<long double>(market_order_shares),
                 static_cast<long double>(market_orders));
}

std::optional<double> ScanSummary::mean_price_maintaining_size() const {
    return ratio(static_cast<long double>(price_maintaining_shares),
                 static_cast<long double>(price_maintaining));
}

}  // namespace lobkit
