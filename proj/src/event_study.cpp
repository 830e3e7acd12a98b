#include "lobkit/event_study.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lobkit/stats.hpp"

namespace lobkit {

namespace {

constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();

bool same_prices(const TapeEntry& a, const TapeEntry& b) { return a.bid == b.bid && a.ask == b.ask; }

bool improves(Side side, std::int64_t price, std::int64_t best) {
    return side == Side::Buy ? price > best : price < best;
}

/// Relaxed rule: flow at the best quote prevailing just before the entry,
/// an arrival that sets a new best, or anything on a side without a quote.
bool at_prevailing_best(const TapeEntry& e, const TapeEntry& pre, Side side) {
    if (e.side != side) return false;
    const std::int64_t best = pre.best(side);
    if (best == 0 || e.price == best) return true;
    return e.kind == BookEventKind::LimitArrival && improves(side, e.price, best);
}

bool at_fixed_best(const TapeEntry& e, const TapeEntry& base, Side side) {
    return e.side == side && e.price == base.best(side);
}

/// Number of leading lags allowed by `bound` (lags with tau <= bound, or
/// < bound when `strict`), and the tightest reason.
struct LagLimit {
    std::size_t count;
    StopReason reason{StopReason::Horizon};

    void tighten(const LagGrid& grid, std::int64_t bound, bool strict, StopReason why) {
        const auto it = strict ? std::lower_bound(grid.ns.begin(), grid.ns.end(), bound)
                               : std::upper_bound(grid.ns.begin(), grid.ns.end(), bound);
        const auto k = static_cast<std::size_t>(it - grid.ns.begin());
        if (k < count) {
            count = k;
            reason = why;
        }
    }
};

void finish_pair(TrajectoryPair& p, const MarketOrderEvent& event, std::int64_t gap_ns,
                 StopReason reason) {
    for (Trajectory* t : {&p.same, &p.opposite}) {
        t->stop = reason;
        t->gap_ns = gap_ns;
        t->event_size = event.total_shares;
        t->direction = event.direction;
    }
}

}  // namespace

std::vector<MarketOrderEvent> detect_market_orders(const FlowTape& tape) {
    std::vector<MarketOrderEvent> out;
    const auto& es = tape.entries;
    std::size_t i = 0;
    while (i < es.size()) {
        if (es[i].kind != BookEventKind::Execution) {
            ++i;
            continue;
        }
        MarketOrderEvent ev;
        ev.t = Timestamp{es[i].time};
        ev.direction = opposite(es[i].side);
        ev.first_entry = i;
        std::size_t j = i;
        while (j < es.size() && es[j].kind == BookEventKind::Execution &&
               es[j].time == es[i].time && es[j].side == es[i].side) {
            ev.fills.push_back(Fill{es[j].order_id, -es[j].delta, Price{es[j].price}});
            ev.total_shares -= es[j].delta;
            ++j;
        }
        ev.last_entry = j - 1;
        ev.price_maintaining = same_prices(tape.before(i), es[j - 1]);
        out.push_back(std::move(ev));
        i = j;
    }
    return out;
}

EventSet select_event_set(std::span<const MarketOrderEvent> events, std::int64_t separation_ns,
                          bool maintaining_only, Horizon horizon,
                          const std::optional<DaySession>& session) {
    if (separation_ns < 0) throw std::invalid_argument("separation must be non-negative");
    EventSet set;
    set.separation_ns = separation_ns;
    set.maintaining_only = maintaining_only;
    set.horizon = horizon;
    for (std::size_t i = 0; i < events.size(); ++i) {
        std::int64_t gap;
        if (horizon == Horizon::After) {
            if (i + 1 == events.size()) continue;
            gap = events[i + 1].t - events[i].t;
        } else {
            if (i == 0) continue;
            gap = events[i].t - events[i - 1].t;
        }
        if (gap < separation_ns) continue;
        if (maintaining_only && !events[i].price_maintaining) continue;
        if (session && !session->contains(events[i].t)) continue;
        set.events.push_back(events[i]);
        set.gaps_ns.push_back(gap);
    }
    return set;
}

LagGrid LagGrid::logarithmic(double min_s, double max_s, int per_decade) {
    if (!(min_s > 0.0) || !(max_s >= min_s) || !std::isfinite(max_s) || per_decade < 1) {
        throw std::invalid_argument("lag grid needs 0 < tau_min <= tau_max and a positive density");
    }
    const double lo = std::log10(min_s);
    const double span = (std::log10(max_s) - lo) * per_decade;
    const auto steps = static_cast<std::int64_t>(std::floor(span + 1e-9));
    LagGrid g;
    for (std::int64_t j = 0; j <= steps; ++j) {
        const double s = std::pow(10.0, lo + static_cast<double>(j) / per_decade);
        const std::int64_t ns = std::llround(s * 1e9);
        if (ns < 1 || (!g.ns.empty() && ns <= g.ns.back())) {
            throw std::invalid_argument("lag grid is finer than the nanosecond clock");
        }
        g.seconds.push_back(s);
        g.ns.push_back(ns);
    }
    return g;
}

TrajectoryPair trajectory_after(const FlowTape& tape, const MarketOrderEvent& event,
                                std::int64_t gap_ns, const LagGrid& grid, TrajectoryMode mode,
                                const DaySession& session) {
    const auto& es = tape.entries;
    const std::int64_t t = event.t.ns;
    std::size_t b = event.last_entry;
    while (b + 1 < es.size() && es[b + 1].time == t) ++b;
    const TapeEntry& base = es[b];
    const Side same = opposite(event.direction);
    const Side opp = event.direction;

    LagLimit limit{grid.size()};
    limit.tighten(grid, gap_ns, false, StopReason::Separation);
    limit.tighten(grid, session.window_end().ns - t, true, StopReason::Session);
    for (Timestamp h : tape.halts) {
        if (h.ns >= t) {
            limit.tighten(grid, h.ns - t, true, StopReason::Halt);
            break;
        }
    }

    TrajectoryPair out;
    out.same.w.reserve(limit.count);
    out.opposite.w.reserve(limit.count);
    StopReason reason = limit.reason;
    std::int64_t w_same = 0;
    std::int64_t w_opp = 0;
    std::size_t j = b + 1;
    for (std::size_t k = 0; k < limit.count; ++k) {
        const std::int64_t until = t + grid.ns[k];
        bool stopped = false;
        for (; j < es.size() && es[j].time <= until; ++j) {
            const TapeEntry& e = es[j];
            if (mode == TrajectoryMode::Strict) {
                if (!same_prices(e, base)) {
                    stopped = true;
                    break;
                }
                if (at_fixed_best(e, base, same)) w_same += e.delta;
                if (at_fixed_best(e, base, opp)) w_opp += e.delta;
            } else {
                const TapeEntry& pre = es[j - 1];
                if (at_prevailing_best(e, pre, same)) w_same += e.delta;
                if (at_prevailing_best(e, pre, opp)) w_opp += e.delta;
            }
        }
        if (stopped) {
            reason = StopReason::QuoteChange;
            break;
        }
        out.same.w.push_back(w_same);
        out.opposite.w.push_back(w_opp);
    }
    finish_pair(out, event, gap_ns, reason);
    return out;
}

TrajectoryPair trajectory_before(const FlowTape& tape, const MarketOrderEvent& event,
                                 std::int64_t gap_ns, const LagGrid& grid, TrajectoryMode mode,
                                 const DaySession& session) {
    const auto& es = tape.entries;
    const std::int64_t t = event.t.ns;
    std::size_t a = event.first_entry;
    while (a > 0 && es[a - 1].time == t) --a;
    const TapeEntry& base = tape.before(a);
    const Side same = opposite(event.direction);
    const Side opp = event.direction;

    LagLimit limit{grid.size()};
    limit.tighten(grid, gap_ns, false, StopReason::Separation);
    limit.tighten(grid, t - session.window_start().ns, false, StopReason::Session);
    std::int64_t last_halt = -1;
    for (Timestamp h : tape.halts) {
        if (h.ns <= t) last_halt = h.ns;
    }
    if (last_halt >= 0) limit.tighten(grid, t - last_halt, false, StopReason::Halt);

    TrajectoryPair out;
    out.same.w.reserve(limit.count);
    out.opposite.w.reserve(limit.count);
    StopReason reason = limit.reason;
    std::int64_t w_same = 0;
    std::int64_t w_opp = 0;
    std::size_t j = a;  // next entry to take is j - 1
    for (std::size_t k = 0; k < limit.count; ++k) {
        const std::int64_t after = t - grid.ns[k];
        bool stopped = false;
        for (; j > 0 && es[j - 1].time > after; --j) {
            const TapeEntry& e = es[j - 1];
            const TapeEntry& pre = tape.before(j - 1);
            if (mode == TrajectoryMode::Strict) {
                if (!same_prices(pre, base)) {
                    stopped = true;
                    break;
                }
                if (at_fixed_best(e, base, same)) w_same += e.delta;
                if (at_fixed_best(e, base, opp)) w_opp += e.delta;
            } else {
                if (at_prevailing_best(e, pre, same)) w_same += e.delta;
                if (at_prevailing_best(e, pre, opp)) w_opp += e.delta;
            }
        }
        if (stopped) {
            reason = StopReason::QuoteChange;
            break;
        }
        out.same.w.push_back(w_same);
        out.opposite.w.push_back(w_opp);
    }
    finish_pair(out, event, gap_ns, reason);
    return out;
}

void TrajectoryBatch::append(TrajectoryBatch&& other) {
    same.insert(same.end(), std::make_move_iterator(other.same.begin()),
                std::make_move_iterator(other.same.end()));
    opposite.insert(opposite.end(), std::make_move_iterator(other.opposite.begin()),
                    std::make_move_iterator(other.opposite.end()));
}

namespace {

TrajectoryPair one_trajectory(const FlowTape& tape, const EventSet& set, std::size_t i,
                              const LagGrid& grid, TrajectoryMode mode, const DaySession& session) {
    return set.horizon == Horizon::After
               ? trajectory_after(tape, set.events[i], set.gaps_ns[i], grid, mode, session)
               : trajectory_before(tape, set.events[i], set.gaps_ns[i], grid, mode, session);
}

}  // namespace

TrajectoryBatch compute_trajectories_serial(const FlowTape& tape, const EventSet& set,
                                            const LagGrid& grid, TrajectoryMode mode,
                                            const DaySession& session) {
    TrajectoryBatch out;
    out.same.reserve(set.size());
    out.opposite.reserve(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        TrajectoryPair p = one_trajectory(tape, set, i, grid, mode, session);
        out.same.push_back(std::move(p.same));
        out.opposite.push_back(std::move(p.opposite));
    }
    return out;
}

TrajectoryBatch compute_trajectories(const FlowTape& tape, const EventSet& set,
                                     const LagGrid& grid, TrajectoryMode mode,
                                     const DaySession& session) {
    TrajectoryBatch out;
    out.same.resize(set.size());
    out.opposite.resize(set.size());
    const auto n = static_cast<std::int64_t>(set.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        TrajectoryPair p = one_trajectory(tape, set, u, grid, mode, session);
        out.same[u] = std::move(p.same);
        out.opposite[u] = std::move(p.opposite);
    }
    return out;
}

void CurveTotals::add(const Trajectory& t) {
    const std::size_t k_end = std::min(t.w.size(), sum.size());
    for (std::size_t k = 0; k < k_end; ++k) {
        sum[k] += t.w[k];
        ++n[k];
    }
}

void CurveTotals::merge(const CurveTotals& other) {
    if (other.sum.size() != sum.size()) throw std::invalid_argument("merging curves of different grids");
    for (std::size_t k = 0; k < sum.size(); ++k) {
        sum[k] += other.sum[k];
        n[k] += other.n[k];
    }
}

std::optional<double> CurveTotals::mean(std::size_t k) const {
    if (n[k] == 0) return std::nullopt;
    return static_cast<double>(sum[k]) / static_cast<double>(n[k]);
}

namespace {

AggregateCurve empty_curve(const LagGrid& grid, CurveSide side, Horizon horizon,
                           const AggregateOptions& options) {
    AggregateCurve c;
    c.side = side;
    c.horizon = horizon;
    c.tau_s = grid.seconds;
    c.totals = CurveTotals(grid.size());
    c.mean.assign(grid.size(), std::nullopt);
    c.std_error.assign(grid.size(), std::nullopt);
    c.bootstrap_B = options.bootstrap_B;
    c.seed = options.seed;
    return c;
}

void finish_lag(AggregateCurve& c, std::size_t k, const std::vector<double>& sample,
                const AggregateOptions& options) {
    c.mean[k] = c.totals.mean(k);
    if (sample.empty()) return;
    if (options.bootstrap_B == 0) {
        c.std_error[k] = 0.0;
        return;
    }
    c.std_error[k] = bootstrap_stderr_serial(sample, options.bootstrap_B,
                                             lag_seed(options.seed, options.curve_id, k))
                         .std_error;
}

}  // namespace

AggregateCurve aggregate_serial(std::span<const Trajectory> trajectories, const LagGrid& grid,
                                CurveSide side, Horizon horizon, const AggregateOptions& options) {
    AggregateCurve c = empty_curve(grid, side, horizon, options);
    std::vector<std::vector<double>> samples(grid.size());
    for (const Trajectory& t : trajectories) {
        c.totals.add(t);
        for (std::size_t k = 0; k < std::min(t.w.size(), grid.size()); ++k) {
            samples[k].push_back(static_cast<double>(t.w[k]));
        }
    }
    for (std::size_t k = 0; k < grid.size(); ++k) finish_lag(c, k, samples[k], options);
    return c;
}

AggregateCurve aggregate(std::span<const Trajectory> trajectories, const LagGrid& grid,
                         CurveSide side, Horizon horizon, const AggregateOptions& options) {
    AggregateCurve c = empty_curve(grid, side, horizon, options);
    const auto lags = static_cast<std::int64_t>(grid.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t kk = 0; kk < lags; ++kk) {
        const auto k = static_cast<std::size_t>(kk);
        std::vector<double> sample;
        std::int64_t sum = 0;
        for (const Trajectory& t : trajectories) {
            if (k < t.w.size()) {
                sum += t.w[k];
                sample.push_back(static_cast<double>(t.w[k]));
            }
        }
        c.totals.sum[k] = sum;
        c.totals.n[k] = static_cast<std::int64_t>(sample.size());
        finish_lag(c, k, sample, options);
    }
    return c;
}

AggregateCurve normalize(const AggregateCurve& curve, double basis) {
    if (!(basis > 0.0) || !std::isfinite(basis)) {
        throw std::invalid_argument("normalization basis must be positive");
    }
    AggregateCurve out = curve;
    out.basis = curve.basis * basis;
    for (auto& m : out.mean) {
        if (m) *m /= basis;
    }
    for (auto& e : out.std_error) {
        if (e) *e /= basis;
    }
    return out;
}

SizePartition partition_by_size(std::span<const Shares> sizes, std::size_t bins) {
    if (bins == 0) throw std::invalid_argument("need at least one size bin");
    if (sizes.size() < bins) {
        throw std::invalid_argument("cannot split " + std::to_string(sizes.size()) +
                                    " events into " + std::to_string(bins) + " bins");
    }
    std::vector<Shares> sorted(sizes.begin(), sizes.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    SizePartition p;
    for (std::size_t j = 1; j < bins; ++j) {
        const std::size_t rank = (j * n + bins - 1) / bins;  // ceil(j n / bins)
        p.thresholds.push_back(sorted[rank - 1]);
    }
    p.bins.resize(bins);
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        const auto it = std::lower_bound(p.thresholds.begin(), p.thresholds.end(), sizes[i]);
        p.bins[static_cast<std::size_t>(it - p.thresholds.begin())].push_back(i);
    }
    p.degenerate = std::any_of(p.bins.begin(), p.bins.end(),
                               [](const auto& b) { return b.empty(); });
    return p;
}

std::string to_string(TrajectoryMode m) { return m == TrajectoryMode::Strict ? "strict" : "relaxed"; }
std::string to_string(CurveSide s) { return s == CurveSide::Same ? "same" : "opposite"; }
std::string to_string(Horizon h) { return h == Horizon::After ? "after" : "before"; }

std::string to_string(StopReason r) {
    switch (r) {
        case StopReason::Horizon: return "horizon";
        case StopReason::Separation: return "separation";
        case StopReason::QuoteChange: return "quote_change";
        case StopReason::Session: return "session";
        case StopReason::Halt: return "halt";
    }
    return "unknown";
}

TrajectoryMode parse_mode(const std::string& text) {
    if (text == "strict" || text == "Strict") return TrajectoryMode::Strict;
    if (text == "relaxed" || text == "Relaxed") return TrajectoryMode::Relaxed;
    throw std::invalid_argument("mode must be strict or relaxed, got '" + text + "'");
}

}  // namespace lobkit
