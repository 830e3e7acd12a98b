#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "lobkit/types.hpp"

namespace lobkit {

/// Best quotes and the volume resting at each of them. Absent sides carry
/// no price and zero volume.
struct QuoteSnapshot {
    std::optional<Price> bid;
    std::optional<Price> ask;
    Shares bid_volume{0};
    Shares ask_volume{0};

    bool operator==(const QuoteSnapshot&) const = default;

    std::optional<std::int64_t> spread() const {
        if (!bid || !ask) return std::nullopt;
        return ask->value - bid->value;
    }
    /// Twice the mid price, so the half-tick stays exact.
    std::optional<std::int64_t> doubled_mid() const {
        if (!bid || !ask) return std::nullopt;
        return ask->value + bid->value;
    }
    std::optional<Price> best(Side s) const { return s == Side::Buy ? bid : ask; }
    Shares volume(Side s) const { return s == Side::Buy ? bid_volume : ask_volume; }
    bool same_prices(const QuoteSnapshot& o) const { return bid == o.bid && ask == o.ask; }
};

enum class BookEventKind : std::uint8_t { LimitArrival, Cancellation, Execution, PriceChange };

/// One visible change to the book. Deltas are signed at the resting side:
/// arrivals positive, cancellations and executions negative, price changes 0.
/// For PriceChange, `price` is the new best on `side` (absent side: price 0).
struct BookEvent {
    BookEventKind kind{BookEventKind::LimitArrival};
    Timestamp time;
    Side side{Side::Buy};
    Price price;
    Shares delta{0};
    OrderId order_id{0};
    std::optional<OrderId> aggressor_id;

    bool operator==(const BookEvent&) const = default;
};

enum class OrderClass : std::uint8_t { MarketOrder, LimitOrder };

struct SubmitResult {
    OrderClass classification{OrderClass::LimitOrder};
    std::vector<BookEvent> events;
};

struct RestingOrder {
    OrderId id{0};
    Side side{Side::Buy};
    Price price;
    Shares shares{0};
    std::uint64_t entry_seq{0};

    bool operator==(const RestingOrder&) const = default;
};

/// One fill of an aggressor against a resting order.
struct Fill {
    OrderId resting_id{0};
    Shares shares{0};
    Price price;

    bool operator==(const Fill&) const = default;
};

struct LevelSummary {
    Price price;
    Shares volume{0};
    std::size_t orders{0};

    bool operator==(const LevelSummary&) const = default;
};

/// Price-time priority limit order book for a single instrument.
///
/// Levels are kept in ordered maps; each level is an intrusive FIFO list of
/// pooled order nodes so cancels and fills never move other orders.
class Book {
public:
    explicit Book(Price tick = kDefaultTick);

    Price tick() const { return tick_; }

    /// Submits an order that may match on arrival. Fills happen at resting
    /// prices in price-then-FIFO order; any remainder rests. PriceChange
    /// events for each moved quote are appended after the fills/arrival.
    SubmitResult submit(OrderId id, Side side, Price price, Shares shares, Timestamp time);

    /// Rests an order without matching. Throws if it would cross the book.
    BookEvent add(OrderId id, Side side, Price price, Shares shares, Timestamp time);

    /// Full cancel when `shares` is empty; partial cancels keep queue position.
    BookEvent cancel(OrderId id, std::optional<Shares> shares, Timestamp time);

    /// Executes `shares` of a resting order against an implicit aggressor.
    BookEvent execute(OrderId id, Shares shares, Timestamp time,
                      std::optional<OrderId> aggressor = std::nullopt);

    QuoteSnapshot quotes() const;

    Shares volume_at(Side side, Price price) const;
    const RestingOrder* find(OrderId id) const;
    std::size_t order_count() const { return index_.size(); }
    std::size_t level_count(Side side) const {
        return side == Side::Buy ? bids_.size() : asks_.size();
    }
    bool empty() const { return index_.empty(); }

    /// Top `k` levels of one side, best first.
    std::vector<LevelSummary> depth(Side side, std::size_t k) const;

    /// Calls fn(price, volume) for up to `k` levels of one side, best first;
    /// returns the number visited.
    template <class Fn>
    std::size_t visit_levels(Side side, std::size_t k, Fn&& fn) const {
        std::size_t n = 0;
        auto walk = [&](const auto& levels) {
            for (auto it = levels.begin(); it != levels.end() && n < k; ++it, ++n) {
                fn(it->first, it->second.volume);
            }
        };
        if (side == Side::Buy) {
            walk(bids_);
        } else {
            walk(asks_);
        }
        return n;
    }

    /// The order first in line at the best price of `side`, if any.
    const RestingOrder* front(Side side) const;

    /// All resting orders of one side in priority order.
    std::vector<RestingOrder> orders(Side side) const;

    /// Visits every resting order of both sides (bids first), priority order.
    void for_each_order(const std::function<void(const RestingOrder&)>& fn) const;

    /// Structural equality: same orders with the same sizes in the same
    /// queue order. Entry sequence numbers are not compared.
    bool same_state(const Book& other) const;

private:
    struct Node {
        RestingOrder order;
        std::int32_t prev{-1};
        std::int32_t next{-1};
    };
    struct Level {
        std::int32_t head{-1};
        std::int32_t tail{-1};
        Shares volume{0};
        std::size_t count{0};
    };
    using BidMap = std::map<Price, Level, std::greater<>>;
    using AskMap = std::map<Price, Level, std::less<>>;

    void check_new_order(OrderId id, Price price, Shares shares) const;
    std::int32_t allocate(const RestingOrder& order);
    void release(std::int32_t slot);
    void rest(OrderId id, Side side, Price price, Shares shares);
    Level* level_of(Side side, Price price);
    void unlink(std::int32_t slot, Level& level);
    void erase_level(Side side, Price price);
    Shares reduce(std::int32_t slot, Shares shares);

    template <class Map>
    void visit_side(const Map& levels, const std::function<void(const RestingOrder&)>& fn) const;

    Price tick_;
    std::uint64_t seq_counter_{0};
    BidMap bids_;
    AskMap asks_;
    std::vector<Node> pool_;
    std::vector<std::int32_t> free_;
    std::unordered_map<OrderId, std::int32_t> index_;
};

/// PriceChange events for each quote that moved between two snapshots.
std::vector<BookEvent> price_changes(const QuoteSnapshot& before, const QuoteSnapshot& after,
                                     Timestamp time);

/// A market order is price-maintaining iff neither best quote moved across
/// its arrival. Returns false when `events` holds no execution.
bool is_price_maintaining(const std::vector<BookEvent>& events, const QuoteSnapshot& pre,
                          const QuoteSnapshot& post);

}  // namespace lobkit
