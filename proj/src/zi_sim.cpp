#include "lobkit/zi_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lobkit {

namespace {

constexpr std::uint32_t kNotResting = std::numeric_limits<std::uint32_t>::max();

Shares parse_shares(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != text.size() || text.empty()) {
        throw ConfigError("order_sizes: bad " + what + " '" + text + "'");
    }
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(sep, start);
        out.push_back(text.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

SizeDistribution parse_sizes(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts[0] == "uniform" && (parts.size() == 3 || parts.size() == 4)) {
        return SizeDistribution::uniform(parse_shares(parts[1], "minimum"),
                                         parse_shares(parts[2], "maximum"),
                                         parts.size() == 4 ? parse_shares(parts[3], "step") : 1);
    }
    if (parts[0] == "weighted" && parts.size() == 2) {
        std::vector<std::pair<Shares, double>> support;
        for (const std::string& item : split(parts[1], ';')) {
            const auto vw = split(item, '@');
            if (vw.size() != 2) throw ConfigError("order_sizes: expected size@weight, got '" + item + "'");
            double w = 0;
            try {
                w = std::stod(vw[1]);
            } catch (const std::exception&) {
                throw ConfigError("order_sizes: bad weight '" + vw[1] + "'");
            }
            support.emplace_back(parse_shares(vw[0], "size"), w);
        }
        return SizeDistribution::weighted(std::move(support));
    }
    throw ConfigError("order_sizes: expected uniform:min:max[:step] or weighted:s@w;s@w..., got '" +
                      text + "'");
}

/// Drives one simulated day. Event times come from the superposition of
/// the limit, market and cancellation clocks; each event type is then picked
/// in proportion to its current rate.
class Simulator {
public:
    Simulator(const ZiConfig& cfg, SimSink& sink)
        : cfg_(cfg), sink_(sink), book_(cfg.tick), rng_(derive_key(cfg.seed, 0)),
          last_bid_(cfg.initial_bid), last_ask_(cfg.initial_bid + cfg.tick) {}

    SimSummary run() {
        seed_book();
        summary_.seed_messages = summary_.messages;
        summary_.initial_book = book_;

        const double limit_total = 2.0 * cfg_.band_levels * cfg_.limit_rate;
        const double market_total = 2.0 * cfg_.market_rate;
        double clock = 0.0;
        while (true) {
            const double cancel_total = cfg_.cancel_rate * static_cast<double>(resting_.size());
            const double total = limit_total + market_total + cancel_total;
            if (total <= 0.0) break;
            const double next = clock + rng_.exponential(total);
            if (next > cfg_.horizon_s) break;
            summary_.resting_order_seconds += static_cast<double>(resting_.size()) * (next - clock);
            clock = next;
            stamp(clock);

            const double u = rng_.uniform() * total;
            if (u < limit_total) {
                limit_order(u < 0.5 * limit_total ? Side::Buy : Side::Sell);
            } else if (u < limit_total + market_total) {
                market_order(u - limit_total < cfg_.market_rate ? Side::Buy : Side::Sell);
            } else {
                cancellation();
            }
        }
        summary_.resting_order_seconds +=
            static_cast<double>(resting_.size()) * (cfg_.horizon_s - clock);
        summary_.final_book = book_;
        return summary_;
    }

private:
    /// Assigns the emitted timestamp for an event at continuous time `clock`.
    void stamp(double clock) {
        std::int64_t orig = cfg_.start.ns + std::llround(clock * 1e9);
        orig = std::max(orig, last_orig_ + 1);
        last_orig_ = orig;
        now_ = orig;
        if (last_out_) now_ = std::max(orig, *last_out_ + cfg_.latency_floor_ns);
        last_out_ = now_;
    }

    void emit(MessageType type, OrderId id, Shares shares, Price price, Side side) {
        const RawMessage msg{Timestamp{now_}, type, id, shares, price, direction_sign(side)};
        ++summary_.messages;
        sink_.on_message(msg, book_);
    }

    void track(OrderId id) {
        if (pos_.size() <= id) pos_.resize(std::max<std::size_t>(id + 1, pos_.size() * 2), kNotResting);
        pos_[id] = static_cast<std::uint32_t>(resting_.size());
        resting_.push_back(id);
    }

    void untrack(OrderId id) {
        const std::uint32_t p = pos_[id];
        const OrderId moved = resting_.back();
        resting_[p] = moved;
        pos_[moved] = p;
        resting_.pop_back();
        pos_[id] = kNotResting;
    }

    void place(Side side, Price price) {
        const OrderId id = next_id_++;
        const Shares shares = cfg_.order_sizes.sample(rng_);
        book_.add(id, side, price, shares, Timestamp{now_});
        track(id);
        emit(MessageType::NewLimit, id, shares, price, side);
    }

    void remember_quotes() {
        const QuoteSnapshot q = book_.quotes();
        if (q.bid) last_bid_ = *q.bid;
        if (q.ask) last_ask_ = *q.ask;
    }

    void seed_book() {
        if (cfg_.initial_levels <= 0) {
            last_orig_ = cfg_.start.ns;
            return;
        }
        now_ = cfg_.start.ns;
        last_orig_ = now_;
        last_out_ = now_;
        for (int level = 0; level < cfg_.initial_levels; ++level) {
            for (int k = 0; k < cfg_.initial_orders_per_level; ++k) {
                place(Side::Buy, cfg_.initial_bid - cfg_.tick * level);
            }
            for (int k = 0; k < cfg_.initial_orders_per_level; ++k) {
                place(Side::Sell, cfg_.initial_bid + cfg_.tick * (level + 1));
            }
        }
        remember_quotes();
    }

    void limit_order(Side side) {
        const std::int64_t j = 1 + static_cast<std::int64_t>(
                                       rng_.below(static_cast<std::uint64_t>(cfg_.band_levels)));
        Price price;
        if (side == Side::Buy) {
            price = book_.quotes().ask.value_or(last_ask_) - cfg_.tick * j;
            if (price < cfg_.tick) price = cfg_.tick;
            if (const auto ask = book_.quotes().ask; ask && price >= *ask) {
                throw std::runtime_error("simulated ask reached the minimum price");
            }
        } else {
            price = book_.quotes().bid.value_or(last_bid_) + cfg_.tick * j;
        }
        ++summary_.limit_orders;
        place(side, price);
        remember_quotes();
    }

    void market_order(Side direction) {
        const Side resting = opposite(direction);
        const QuoteSnapshot pre = book_.quotes();
        if (!pre.best(resting)) {
            ++summary_.skipped_market_orders;
            return;
        }
        const Shares size = std::min(cfg_.order_sizes.sample(rng_), pre.volume(resting));
        SimMarketOrder mo;
        mo.time = Timestamp{now_};
        mo.direction = direction;
        mo.total_shares = size;
        mo.first_message = summary_.messages;
        Shares remaining = size;
        while (remaining > 0) {
            const RestingOrder front = *book_.front(resting);
            const Shares fill = std::min(remaining, front.shares);
            book_.execute(front.id, fill, Timestamp{now_});
            if (fill == front.shares) untrack(front.id);
            mo.fills.push_back(Fill{front.id, fill, front.price});
            emit(MessageType::ExecuteVisible, front.id, fill, front.price, resting);
            remaining -= fill;
        }
        const QuoteSnapshot post = book_.quotes();
        mo.price_maintaining = pre.same_prices(post);
        ++summary_.market_orders;
        sink_.on_market_order(mo);
        refill_if_empty(resting);
        remember_quotes();
    }

    void cancellation() {
        const OrderId id = resting_[rng_.below(resting_.size())];
        const RestingOrder order = *book_.find(id);
        book_.cancel(id, std::nullopt, Timestamp{now_});
        untrack(id);
        ++summary_.cancellations;
        emit(MessageType::Delete, id, order.shares, order.price, order.side);
        refill_if_empty(order.side);
        remember_quotes();
    }

    void refill_if_empty(Side side) {
        if (book_.level_count(side) > 0) return;
        const Price price = side == Side::Buy ? last_bid_ : last_ask_;
        const int count = std::max(1, cfg_.initial_orders_per_level);
        for (int k = 0; k < count; ++k) place(side, price);
        ++summary_.reseeds;
        sink_.on_reseed(Reseed{Timestamp{now_}, side, price});
    }

    const ZiConfig& cfg_;
    SimSink& sink_;
    Book book_;
    CounterRng rng_;
    SimSummary summary_;
    OrderId next_id_{1};
    std::vector<OrderId> resting_;
    std::vector<std::uint32_t> pos_;
    Price last_bid_;
    Price last_ask_;
    std::int64_t now_{0};
    std::int64_t last_orig_{0};
    std::optional<std::int64_t> last_out_;
};

class CollectingSink : public SimSink {
public:
    explicit CollectingSink(SimOutput& out) : out_(out) {}
    void on_message(const RawMessage& msg, const Book& book) override {
        out_.messages.push_back(msg);
        out_.snapshots.append(book);
    }
    void on_market_order(const SimMarketOrder& mo) override { out_.market_orders.push_back(mo); }
    void on_reseed(const Reseed& r) override { out_.reseeds.push_back(r); }

private:
    SimOutput& out_;
};

}  // namespace

SizeDistribution SizeDistribution::uniform(Shares min, Shares max, Shares step) {
    if (min <= 0 || step <= 0 || max < min || (max - min) % step != 0) {
        throw std::invalid_argument("uniform size distribution needs 0 < min <= max, step > 0 "
                                    "dividing max - min");
    }
    SizeDistribution d;
    d.min_ = min;
    d.step_ = step;
    d.count_ = (max - min) / step + 1;
    return d;
}

SizeDistribution SizeDistribution::weighted(std::vector<std::pair<Shares, double>> support) {
    if (support.empty()) throw std::invalid_argument("weighted size distribution is empty");
    SizeDistribution d;
    d.uniform_ = false;
    double total = 0.0;
    for (const auto& [v, w] : support) {
        if (v <= 0 || !(w >= 0.0) || !std::isfinite(w)) {
            throw std::invalid_argument("weighted size distribution needs positive sizes and "
                                        "non-negative weights");
        }
        total += w;
    }
    if (!(total > 0.0)) throw std::invalid_argument("weighted size distribution has zero mass");
    double acc = 0.0;
    for (const auto& [v, w] : support) {
        acc += w / total;
        d.values_.push_back(v);
        d.cdf_.push_back(acc);
    }
    d.cdf_.back() = 1.0;
    return d;
}

Shares SizeDistribution::sample(CounterRng& rng) const {
    if (uniform_) {
        return min_ + step_ * static_cast<Shares>(rng.below(static_cast<std::uint64_t>(count_)));
    }
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return values_[static_cast<std::size_t>(std::min<std::ptrdiff_t>(
        it - cdf_.begin(), static_cast<std::ptrdiff_t>(values_.size()) - 1))];
}

double SizeDistribution::mean() const {
    if (uniform_) {
        return static_cast<double>(min_) + static_cast<double>(step_) * static_cast<double>(count_ - 1) / 2.0;
    }
    double m = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        m += static_cast<double>(values_[i]) * (cdf_[i] - prev);
        prev = cdf_[i];
    }
    return m;
}

std::string SizeDistribution::describe() const {
    if (uniform_) {
        return "uniform:" + std::to_string(min_) + ":" + std::to_string(min_ + step_ * (count_ - 1)) +
               ":" + std::to_string(step_);
    }
    std::string out = "weighted:";
    double prev = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (i > 0) out += ';';
        out += std::to_string(values_[i]) + "@" + format_double(cdf_[i] - prev);
        prev = cdf_[i];
    }
    return out;
}

void ZiConfig::validate() const {
    auto rate_ok = [](double r) { return std::isfinite(r) && r >= 0.0; };
    if (!rate_ok(limit_rate) || !rate_ok(market_rate) || !rate_ok(cancel_rate)) {
        throw ConfigError("rates must be finite and non-negative");
    }
    if (band_levels < 1) throw ConfigError("band_levels must be at least 1");
    if (!(horizon_s > 0.0) || !std::isfinite(horizon_s)) throw ConfigError("horizon must be positive");
    if (tick.value <= 0) throw ConfigError("tick must be positive");
    if (initial_bid.value <= 0 || initial_bid.value % tick.value != 0) {
        throw ConfigError("initial_bid must be a positive multiple of tick");
    }
    if (initial_levels < 0 || initial_orders_per_level < 0) {
        throw ConfigError("initial_levels and initial_orders_per_level must be non-negative");
    }
    if (initial_levels > 0 && initial_bid - tick * (initial_levels - 1) < tick) {
        throw ConfigError("initial_bid is too low for " + std::to_string(initial_levels) +
                          " seeded levels");
    }
    if (latency_floor_ns < 0) throw ConfigError("latency_floor_ns must be non-negative");
    if (snapshot_levels < 1) throw ConfigError("snapshot_levels must be at least 1");
}

const std::set<std::string>& ZiConfig::keys() {
    static const std::set<std::string> k{
        "limit_rate",   "market_rate",      "cancel_rate",    "band_levels",
        "order_sizes",  "tick",             "initial_bid",    "initial_levels",
        "initial_orders_per_level",         "latency_floor_ns", "horizon",
        "seed",         "start_time",       "snapshot_levels"};
    return k;
}

ZiConfig ZiConfig::from_config(const KvConfig& cfg) {
    const auto unknown = cfg.unknown_keys(keys());
    if (!unknown.empty()) {
        std::string names;
        for (const auto& k : unknown) names += (names.empty() ? "" : ", ") + k;
        throw ConfigError("unknown simulator config keys: " + names);
    }
    ZiConfig z;
    z.limit_rate = cfg.get_double("limit_rate", z.limit_rate);
    z.market_rate = cfg.get_double("market_rate", z.market_rate);
    z.cancel_rate = cfg.get_double("cancel_rate", z.cancel_rate);
    z.band_levels = static_cast<int>(cfg.get_int("band_levels", z.band_levels));
    if (const auto s = cfg.get("order_sizes")) {
        try {
            z.order_sizes = parse_sizes(*s);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("order_sizes: ") + e.what());
        }
    }
    z.tick = Price{cfg.get_int("tick", z.tick.value)};
    z.initial_bid = Price{cfg.get_int("initial_bid", z.initial_bid.value)};
    z.initial_levels = static_cast<int>(cfg.get_int("initial_levels", z.initial_levels));
    z.initial_orders_per_level =
        static_cast<int>(cfg.get_int("initial_orders_per_level", z.initial_orders_per_level));
    z.latency_floor_ns = cfg.get_int("latency_floor_ns", z.latency_floor_ns);
    z.horizon_s = cfg.get_double("horizon", z.horizon_s);
    z.seed = cfg.get_uint("seed", z.seed);
    if (const auto s = cfg.get("start_time")) {
        try {
            z.start = parse_time(*s);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(std::string("start_time: ") + e.what());
        }
    }
    z.snapshot_levels = static_cast<std::size_t>(
        cfg.get_uint("snapshot_levels", static_cast<std::uint64_t>(z.snapshot_levels)));
    z.validate();
    return z;
}

KvConfig ZiConfig::to_config() const {
    KvConfig c;
    c.set("limit_rate", format_double(limit_rate));
    c.set("market_rate", format_double(market_rate));
    c.set("cancel_rate", format_double(cancel_rate));
    c.set("band_levels", std::to_string(band_levels));
    c.set("order_sizes", order_sizes.describe());
    c.set("tick", std::to_string(tick.value));
    c.set("initial_bid", std::to_string(initial_bid.value));
    c.set("initial_levels", std::to_string(initial_levels));
    c.set("initial_orders_per_level", std::to_string(initial_orders_per_level));
    c.set("latency_floor_ns", std::to_string(latency_floor_ns));
    c.set("horizon", format_double(horizon_s));
    c.set("seed", std::to_string(seed));
    c.set("start_time", format_time(start));
    c.set("snapshot_levels", std::to_string(snapshot_levels));
    return c;
}

SimSummary simulate_day(const ZiConfig& config, SimSink& sink) {
    config.validate();
    return Simulator(config, sink).run();
}

SimOutput simulate_day(const ZiConfig& config) {
    SimOutput out;
    out.snapshots = SnapshotTable(config.snapshot_levels);
    CollectingSink sink(out);
    out.summary = simulate_day(config, sink);
    return out;
}

std::vector<RawMessage> inject_latency_floor(std::span<const RawMessage> messages,
                                             std::int64_t floor_ns) {
    if (floor_ns < 0) throw std::invalid_argument("latency floor must be non-negative");
    std::vector<RawMessage> out(messages.begin(), messages.end());
    std::optional<std::int64_t> prev_out;
    std::size_t i = 0;
    while (i < out.size()) {
        const std::int64_t orig = out[i].time.ns;
        const std::int64_t shifted = prev_out ? std::max(orig, *prev_out + floor_ns) : orig;
        for (; i < out.size() && messages[i].time.ns == orig; ++i) out[i].time.ns = shifted;
        prev_out = shifted;
    }
    return out;
}

}  // namespace lobkit
