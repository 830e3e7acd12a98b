#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "lobkit/book.hpp"
#include "lobkit/config.hpp"
#include "lobkit/messages.hpp"
#include "lobkit/rng.hpp"

namespace lobkit {

/// Discrete distribution over order sizes.
class SizeDistribution {
public:
    /// Uniform over {min, min + step, ..., max}.
    static SizeDistribution uniform(Shares min, Shares max, Shares step = 1);
    /// Arbitrary support with non-negative weights (normalized internally).
    static SizeDistribution weighted(std::vector<std::pair<Shares, double>> support);

    Shares sample(CounterRng& rng) const;
    double mean() const;
    std::size_t support_size() const { return uniform_ ? static_cast<std::size_t>(count_) : values_.size(); }
    std::string describe() const;

private:
    Shares min_{1};
    Shares step_{1};
    Shares count_{1};
    std::vector<Shares> values_;  ///< weighted case only
    std::vector<double> cdf_;
    bool uniform_{true};
};

/// Rates and seeding of the zero-intelligence order-flow model. Limit orders
/// land uniformly on the `band_levels` ticks behind the opposite best quote.
struct ZiConfig {
    double limit_rate{1.0};    ///< per second, per band level, per side
    double market_rate{0.1};   ///< per second, per side
    double cancel_rate{0.01};  ///< per second, per resting order
    int band_levels{5};
    SizeDistribution order_sizes = SizeDistribution::uniform(100, 1000, 100);
    Price tick{100};
    Price initial_bid{450'000};
    int initial_levels{5};             ///< seeded levels per side
    int initial_orders_per_level{10};  ///< also the reseed depth
    std::int64_t latency_floor_ns{0};
    double horizon_s{23'400.0};
    Timestamp start = Timestamp::from_seconds(9 * 3600 + 30 * 60);
    std::uint64_t seed{1};
    std::size_t snapshot_levels{5};

    void validate() const;

    /// Reads the keys listed in `keys()`; throws ConfigError naming any
    /// unknown key.
    static ZiConfig from_config(const KvConfig& cfg);
    KvConfig to_config() const;
    static const std::set<std::string>& keys();
};

struct SimMarketOrder {
    Timestamp time;
    Side direction{Side::Buy};  ///< aggressor side
    Shares total_shares{0};
    bool price_maintaining{false};
    std::vector<Fill> fills;
    std::size_t first_message{0};

    bool operator==(const SimMarketOrder&) const = default;
};

struct Reseed {
    Timestamp time;
    Side side{Side::Buy};
    Price price;
};

/// Receives the simulated stream as it is produced.
class SimSink {
public:
    virtual ~SimSink() = default;
    /// Called after `msg` has been applied to `book`.
    virtual void on_message(const RawMessage& msg, const Book& book) = 0;
    virtual void on_market_order(const SimMarketOrder&) {}
    virtual void on_reseed(const Reseed&) {}
};

struct SimSummary {
    Book initial_book;
    Book final_book;
    std::size_t messages{0};
    std::size_t seed_messages{0};  ///< leading rows that build the initial book
    std::size_t limit_orders{0};
    std::size_t market_orders{0};
    std::size_t cancellations{0};
    std::size_t skipped_market_orders{0};  ///< arrivals that found an empty opposite side
    std::size_t reseeds{0};
    double resting_order_seconds{0.0};  ///< integral of the resting-order count
};

/// Runs one simulated day and streams every message to `sink`.
SimSummary simulate_day(const ZiConfig& config, SimSink& sink);

struct SimOutput {
    std::vector<RawMessage> messages;
    SnapshotTable snapshots;
    std::vector<SimMarketOrder> market_orders;
    std::vector<Reseed> reseeds;
    SimSummary summary;
};

/// In-memory form of simulate_day.
SimOutput simulate_day(const ZiConfig& config);

/// Delays every event that follows its predecessor by less than `floor_ns`
/// to exactly `floor_ns` after it. Consecutive rows sharing a timestamp are
/// one event and move together.
std::vector<RawMessage> inject_latency_floor(std::span<const RawMessage> messages,
                                             std::int64_t floor_ns);

}  // namespace lobkit
