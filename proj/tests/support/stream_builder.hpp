#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "lobkit/messages.hpp"

namespace lobkit::oracle {

/// Writes message rows by hand while remembering what each order rests as.
class StreamBuilder {
public:
    OrderId add(std::int64_t t_ns, Side side, std::int64_t price, Shares shares) {
        const OrderId id = next_++;
        live_[id] = Live{side, price, shares};
        push(t_ns, MessageType::NewLimit, id, shares, price, side);
        return id;
    }

    void cancel(std::int64_t t_ns, OrderId id, Shares shares) {
        Live& o = live_.at(id);
        o.shares -= shares;
        push(t_ns, MessageType::PartialCancel, id, shares, o.price, o.side);
        if (o.shares == 0) live_.erase(id);
    }

    void remove(std::int64_t t_ns, OrderId id) {
        const Live o = live_.at(id);
        live_.erase(id);
        push(t_ns, MessageType::Delete, id, o.shares, o.price, o.side);
    }

    void execute(std::int64_t t_ns, OrderId id, Shares shares) {
        Live& o = live_.at(id);
        if (shares > o.shares) throw std::logic_error("overfill in fixture");
        o.shares -= shares;
        push(t_ns, MessageType::ExecuteVisible, id, shares, o.price, o.side);
        if (o.shares == 0) live_.erase(id);
    }

    void hidden(std::int64_t t_ns, Side resting, std::int64_t price, Shares shares) {
        push(t_ns, MessageType::ExecuteHidden, 0, shares, price, resting);
    }

    void halt(std::int64_t t_ns) { push(t_ns, MessageType::Halt, 0, 0, -1, Side::Sell); }

    bool live(OrderId id) const { return live_.contains(id); }
    Shares shares(OrderId id) const { return live_.at(id).shares; }
    const std::vector<RawMessage>& messages() const { return msgs_; }

private:
    struct Live {
        Side side;
        std::int64_t price;
        Shares shares;
    };

    void push(std::int64_t t_ns, MessageType type, OrderId id, Shares shares, std::int64_t price,
              Side side) {
        msgs_.push_back(RawMessage{Timestamp{t_ns}, type, id, shares, Price{price},
                                   direction_sign(side)});
    }

    OrderId next_{1};
    std::map<OrderId, Live> live_;
    std::vector<RawMessage> msgs_;
};

}  // namespace lobkit::oracle
