#pragma once

#include <cstddef>
#include <optional>

#include "lobkit/replay.hpp"
#include "lobkit/tape.hpp"

namespace lobkit {

/// Summary statistics of one replayed day inside its session window.
///
/// Event percentages count events at the best quotes: a market order once
/// however many fills it has, a limit arrival that joins or improves its
/// side's best (or quotes an empty side), and a cancellation, full or
/// partial, of an order resting at its side's best.
struct ScanSummary {
    std::size_t market_orders{0};
    std::size_t price_maintaining{0};
    std::size_t limit_arrivals_at_best{0};
    std::size_t cancellations_at_best{0};
    std::size_t limit_arrivals{0};  ///< at any price
    std::size_t cancellations{0};   ///< at any price
    std::size_t fills{0};

    // Raw accumulators; days merge exactly.
    Uint128 spread_area{0};      ///< price units x ns while both sides quote
    Uint128 spread_duration{0};  ///< ns
    long double notional{0};     ///< price units x shares over visible fills
    std::int64_t traded_shares{0};
    std::int64_t market_order_shares{0};
    std::int64_t price_maintaining_shares{0};
    VolumeIntegral best_volume;

    void merge(const ScanSummary& o);

    std::optional<double> mean_spread() const;       ///< dollars, time-weighted
    std::optional<double> mean_trade_price() const;  ///< dollars, share-weighted
    std::optional<double> mean_best_volume() const;  ///< shares, time-weighted, both sides pooled
    std::optional<double> mean_market_order_size() const;
    std::optional<double> mean_price_maintaining_size() const;

    std::size_t events_at_best() const {
        return market_orders + limit_arrivals_at_best + cancellations_at_best;
    }
    std::optional<double> market_order_pct() const { return pct(market_orders); }
    std::optional<double> limit_arrival_pct() const { return pct(limit_arrivals_at_best); }
    std::optional<double> cancellation_pct() const { return pct(cancellations_at_best); }

private:
    std::optional<double> pct(std::size_t n) const {
        if (events_at_best() == 0) return std::nullopt;
        return 100.0 * static_cast<double>(n) / static_cast<double>(events_at_best());
    }
};

/// Throws std::invalid_argument if the window holds no book events.
ScanSummary scan_tape(const FlowTape& tape, const DaySession& session);

}  // namespace lobkit
