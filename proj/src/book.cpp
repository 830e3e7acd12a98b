#include "lobkit/book.hpp"

#include <algorithm>
#include <string>

namespace lobkit {

Book::Book(Price tick) : tick_(tick) {
    if (tick.value <= 0) throw std::invalid_argument("tick must be positive");
}

void Book::check_new_order(OrderId id, Price price, Shares shares) const {
    if (shares <= 0) {
        throw BookError("order " + std::to_string(id) + ": non-positive size " +
                        std::to_string(shares));
    }
    if (price.value <= 0 || price.value % tick_.value != 0) {
        throw BookError("order " + std::to_string(id) + ": price " + std::to_string(price.value) +
                        " is not a positive multiple of tick " + std::to_string(tick_.value));
    }
    if (index_.contains(id)) {
        throw BookError("order " + std::to_string(id) + " is already resident");
    }
}

std::int32_t Book::allocate(const RestingOrder& order) {
    std::int32_t slot;
    if (!free_.empty()) {
        slot = free_.back();
        free_.pop_back();
        pool_[static_cast<std::size_t>(slot)] = Node{order, -1, -1};
    } else {
        slot = static_cast<std::int32_t>(pool_.size());
        pool_.push_back(Node{order, -1, -1});
    }
    return slot;
}

void Book::release(std::int32_t slot) { free_.push_back(slot); }

Book::Level* Book::level_of(Side side, Price price) {
    if (side == Side::Buy) {
        auto it = bids_.find(price);
        return it == bids_.end() ? nullptr : &it->second;
    }
    auto it = asks_.find(price);
    return it == asks_.end() ? nullptr : &it->second;
}

void Book::rest(OrderId id, Side side, Price price, Shares shares) {
    const std::int32_t slot = allocate(RestingOrder{id, side, price, shares, seq_counter_++});
    Level& level = side == Side::Buy ? bids_[price] : asks_[price];
    Node& node = pool_[static_cast<std::size_t>(slot)];
    node.prev = level.tail;
    if (level.tail >= 0) {
        pool_[static_cast<std::size_t>(level.tail)].next = slot;
    } else {
        level.head = slot;
    }
    level.tail = slot;
    level.volume += shares;
    ++level.count;
    index_.emplace(id, slot);
}

void Book::unlink(std::int32_t slot, Level& level) {
    Node& node = pool_[static_cast<std::size_t>(slot)];
    if (node.prev >= 0) {
        pool_[static_cast<std::size_t>(node.prev)].next = node.next;
    } else {
        level.head = node.next;
    }
    if (node.next >= 0) {
        pool_[static_cast<std::size_t>(node.next)].prev = node.prev;
    } else {
        level.tail = node.prev;
    }
    --level.count;
}

void Book::erase_level(Side side, Price price) {
    if (side == Side::Buy) {
        bids_.erase(price);
    } else {
        asks_.erase(price);
    }
}

Shares Book::reduce(std::int32_t slot, Shares shares) {
    Node& node = pool_[static_cast<std::size_t>(slot)];
    const Side side = node.order.side;
    const Price price = node.order.price;
    Level* level = level_of(side, price);
    node.order.shares -= shares;
    level->volume -= shares;
    const Shares remaining = node.order.shares;
    if (remaining == 0) {
        index_.erase(node.order.id);
        unlink(slot, *level);
        release(slot);
        if (level->count == 0) erase_level(side, price);
    }
    return remaining;
}

SubmitResult Book::submit(OrderId id, Side side, Price price, Shares shares, Timestamp time) {
    check_new_order(id, price, shares);
    const QuoteSnapshot before = quotes();
    SubmitResult result;
    Shares remaining = shares;

    auto match = [&](auto& book_side, auto crosses) {
        while (remaining > 0 && !book_side.empty() && crosses(book_side.begin()->first)) {
            const Price level_price = book_side.begin()->first;
            const std::int32_t slot = book_side.begin()->second.head;
            const RestingOrder& resting = pool_[static_cast<std::size_t>(slot)].order;
            const Shares fill = std::min(remaining, resting.shares);
            result.events.push_back(BookEvent{BookEventKind::Execution, time, resting.side,
                                              level_price, -fill, resting.id, id});
            remaining -= fill;
            reduce(slot, fill);
        }
    };
    if (side == Side::Buy) {
        match(asks_, [price](Price p) { return p <= price; });
    } else {
        match(bids_, [price](Price p) { return p >= price; });
    }

    result.classification =
        result.events.empty() ? OrderClass::LimitOrder : OrderClass::MarketOrder;
    if (remaining > 0) {
        rest(id, side, price, remaining);
        result.events.push_back(
            BookEvent{BookEventKind::LimitArrival, time, side, price, remaining, id, std::nullopt});
    }
    for (BookEvent& ev : price_changes(before, quotes(), time)) {
        result.events.push_back(ev);
    }
    return result;
}

BookEvent Book::add(OrderId id, Side side, Price price, Shares shares, Timestamp time) {
    check_new_order(id, price, shares);
    if (side == Side::Buy && !asks_.empty() && price >= asks_.begin()->first) {
        throw BookError("order " + std::to_string(id) + ": buy at " + std::to_string(price.value) +
                        " would cross ask " + std::to_string(asks_.begin()->first.value));
    }
    if (side == Side::Sell && !bids_.empty() && price <= bids_.begin()->first) {
        throw BookError("order " + std::to_string(id) + ": sell at " +
                        std::to_string(price.value) + " would cross bid " +
                        std::to_string(bids_.begin()->first.value));
    }
    rest(id, side, price, shares);
    return BookEvent{BookEventKind::LimitArrival, time, side, price, shares, id, std::nullopt};
}

BookEvent Book::cancel(OrderId id, std::optional<Shares> shares, Timestamp time) {
    auto it = index_.find(id);
    if (it == index_.end()) {
        throw BookError("cancel of unknown order " + std::to_string(id));
    }
    const std::int32_t slot = it->second;
    const RestingOrder order = pool_[static_cast<std::size_t>(slot)].order;
    const Shares amount = shares.value_or(order.shares);
    if (amount <= 0 || amount > order.shares) {
        throw BookError("cancel of " + std::to_string(amount) + " shares from order " +
                        std::to_string(id) + " holding " + std::to_string(order.shares));
    }
    reduce(slot, amount);
    return BookEvent{BookEventKind::Cancellation, time, order.side, order.price, -amount, id,
                     std::nullopt};
}

BookEvent Book::execute(OrderId id, Shares shares, Timestamp time,
                        std::optional<OrderId> aggressor) {
    auto it = index_.find(id);
    if (it == index_.end()) {
        throw BookError("execution against unknown order " + std::to_string(id));
    }
    const std::int32_t slot = it->second;
    const RestingOrder order = pool_[static_cast<std::size_t>(slot)].order;
    if (shares <= 0 || shares > order.shares) {
        throw BookError("execution of " + std::to_string(shares) + " shares against order " +
                        std::to_string(id) + " holding " + std::to_string(order.shares));
    }
    reduce(slot, shares);
    return BookEvent{BookEventKind::Execution, time, order.side, order.price, -shares, id,
                     aggressor};
}

QuoteSnapshot Book::quotes() const {
    QuoteSnapshot q;
    if (!bids_.empty()) {
        q.bid = bids_.begin()->first;
        q.bid_volume = bids_.begin()->second.volume;
    }
    if (!asks_.empty()) {
        q.ask = asks_.begin()->first;
        q.ask_volume = asks_.begin()->second.volume;
    }
    return q;
}

Shares Book::volume_at(Side side, Price price) const {
    if (side == Side::Buy) {
        auto it = bids_.find(price);
        return it == bids_.end() ? 0 : it->second.volume;
    }
    auto it = asks_.find(price);
    return it == asks_.end() ? 0 : it->second.volume;
}

const RestingOrder* Book::find(OrderId id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return nullptr;
    return &pool_[static_cast<std::size_t>(it->second)].order;
}

const RestingOrder* Book::front(Side side) const {
    if (side == Side::Buy) {
        if (bids_.empty()) return nullptr;
        return &pool_[static_cast<std::size_t>(bids_.begin()->second.head)].order;
    }
    if (asks_.empty()) return nullptr;
    return &pool_[static_cast<std::size_t>(asks_.begin()->second.head)].order;
}

std::vector<LevelSummary> Book::depth(Side side, std::size_t k) const {
    std::vector<LevelSummary> out;
    out.reserve(k);
    auto collect = [&](const auto& levels) {
        for (const auto& [price, level] : levels) {
            if (out.size() == k) break;
            out.push_back(LevelSummary{price, level.volume, level.count});
        }
    };
    if (side == Side::Buy) {
        collect(bids_);
    } else {
        collect(asks_);
    }
    return out;
}

template <class Map>
void Book::visit_side(const Map& levels,
                      const std::function<void(const RestingOrder&)>& fn) const {
    for (const auto& [price, level] : levels) {
        for (std::int32_t slot = level.head; slot >= 0;
             slot = pool_[static_cast<std::size_t>(slot)].next) {
            fn(pool_[static_cast<std::size_t>(slot)].order);
        }
    }
}

std::vector<RestingOrder> Book::orders(Side side) const {
    std::vector<RestingOrder> out;
    auto push = [&out](const RestingOrder& o) { out.push_back(o); };
    if (side == Side::Buy) {
        visit_side(bids_, push);
    } else {
        visit_side(asks_, push);
    }
    return out;
}

void Book::for_each_order(const std::function<void(const RestingOrder&)>& fn) const {
    visit_side(bids_, fn);
    visit_side(asks_, fn);
}

bool Book::same_state(const Book& other) const {
    if (order_count() != other.order_count()) return false;
    for (Side side : {Side::Buy, Side::Sell}) {
        const auto mine = orders(side);
        const auto theirs = other.orders(side);
        if (mine.size() != theirs.size()) return false;
        for (std::size_t i = 0; i < mine.size(); ++i) {
            if (mine[i].id != theirs[i].id || mine[i].price != theirs[i].price ||
                mine[i].shares != theirs[i].shares) {
                return false;
            }
        }
    }
    return true;
}

std::vector<BookEvent> price_changes(const QuoteSnapshot& before, const QuoteSnapshot& after,
                                     Timestamp time) {
    std::vector<BookEvent> out;
    if (before.bid != after.bid) {
        out.push_back(BookEvent{BookEventKind::PriceChange, time, Side::Buy,
                                after.bid.value_or(Price{0}), 0, 0, std::nullopt});
    }
    if (before.ask != after.ask) {
        out.push_back(BookEvent{BookEventKind::PriceChange, time, Side::Sell,
                                after.ask.value_or(Price{0}), 0, 0, std::nullopt});
    }
    return out;
}

bool is_price_maintaining(const std::vector<BookEvent>& events, const QuoteSnapshot& pre,
                          const QuoteSnapshot& post) {
    const bool has_fill = std::any_of(events.begin(), events.end(), [](const BookEvent& e) {
        return e.kind == BookEventKind::Execution;
    });
    return has_fill && pre.same_prices(post);
}

}  // namespace lobkit
