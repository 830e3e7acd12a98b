#include <gtest/gtest.h>

#include "lobkit/scan.hpp"
#include "lobkit/zi_sim.hpp"
#include "support/stream_builder.hpp"

using namespace lobkit;
using oracle::StreamBuilder;

namespace {

constexpr std::int64_t kSec = 1'000'000'000;

DaySession first_ten_seconds() {
    DaySession s;
    s.open = Timestamp{0};
    s.close = Timestamp{10 * kSec};
    s.trim_ns = 0;
    return s;
}

}  // namespace

TEST(Scan, TenMessageDay) {
    StreamBuilder sb;
    const OrderId bid = sb.add(1 * kSec, Side::Buy, 1'000'000, 100);
    const OrderId ask = sb.add(1 * kSec, Side::Sell, 1'000'100, 200);
    const OrderId deep = sb.add(2 * kSec, Side::Buy, 999'900, 50);
    const OrderId join = sb.add(3 * kSec, Side::Sell, 1'000'100, 100);
    sb.execute(4 * kSec, ask, 150);
    sb.cancel(5 * kSec, join, 40);
    sb.remove(6 * kSec, deep);
    sb.execute(7 * kSec, bid, 100);
    sb.add(8 * kSec, Side::Buy, 1'000'000, 70);
    sb.hidden(9 * kSec, Side::Sell, 1'000'100, 500);
    ASSERT_EQ(sb.messages().size(), 10u);

    const ScanSummary s = scan_tape(build_tape(sb.messages()), first_ten_seconds());
    EXPECT_EQ(s.market_orders, 2u);
    EXPECT_EQ(s.price_maintaining, 1u);
    EXPECT_EQ(s.limit_arrivals_at_best, 4u);
    EXPECT_EQ(s.cancellations_at_best, 1u);
    EXPECT_EQ(s.limit_arrivals, 5u);
    EXPECT_EQ(s.cancellations, 2u);
    EXPECT_EQ(s.fills, 2u);
    EXPECT_EQ(s.events_at_best(), 7u);
    EXPECT_DOUBLE_EQ(*s.market_order_pct(), 200.0 / 7.0);
    EXPECT_DOUBLE_EQ(*s.limit_arrival_pct(), 400.0 / 7.0);
    EXPECT_DOUBLE_EQ(*s.cancellation_pct(), 100.0 / 7.0);
    EXPECT_DOUBLE_EQ(*s.mean_spread(), 0.01);
    EXPECT_DOUBLE_EQ(*s.mean_trade_price(), 100.006);
    EXPECT_DOUBLE_EQ(*s.mean_best_volume(), 2140.0 / 17.0);
    EXPECT_DOUBLE_EQ(*s.mean_market_order_size(), 125.0);
    EXPECT_DOUBLE_EQ(*s.mean_price_maintaining_size(), 150.0);
}

TEST(Scan, NoExecutionsLeavesMarketOrderColumnsAbsent) {
    StreamBuilder sb;
    sb.add(1 * kSec, Side::Buy, 1'000'000, 100);
    sb.add(2 * kSec, Side::Sell, 1'000'200, 100);
    const ScanSummary s = scan_tape(build_tape(sb.messages()), first_ten_seconds());
    EXPECT_EQ(s.market_orders, 0u);
    EXPECT_EQ(*s.market_order_pct(), 0.0);
    EXPECT_FALSE(s.mean_market_order_size());
    EXPECT_FALSE(s.mean_trade_price());
    EXPECT_FALSE(s.mean_price_maintaining_size());
    EXPECT_DOUBLE_EQ(*s.mean_spread(), 0.02);
}

TEST(Scan, EmptyWindowThrows) {
    StreamBuilder sb;
    sb.add(20 * kSec, Side::Buy, 1'000'000, 100);
    EXPECT_THROW(scan_tape(build_tape(sb.messages()), first_ten_seconds()), std::invalid_argument);
}

TEST(Scan, SingleLevelSimulationMatchesConfiguredMix) {
    // One deep level per side: every event happens at the best quotes.
    ZiConfig cfg;
    cfg.band_levels = 1;
    cfg.initial_levels = 1;
    cfg.initial_orders_per_level = 20'000;
    cfg.limit_rate = 26.5;
    cfg.market_rate = 1.0;
    cfg.cancel_rate = 45.0 / 40'000.0;
    cfg.horizon_s = 600.0;
    const SimOutput out = simulate_day(cfg);
    DaySession s;
    s.open = cfg.start;
    s.close = cfg.start + 600 * kSec;
    s.trim_ns = 50 * kSec;
    const ScanSummary sum = scan_tape(build_tape(out.messages), s);
    EXPECT_EQ(sum.limit_arrivals, sum.limit_arrivals_at_best);
    EXPECT_EQ(sum.cancellations, sum.cancellations_at_best);
    EXPECT_NEAR(*sum.market_order_pct(), 2.0, 1.0);
    EXPECT_NEAR(*sum.limit_arrival_pct(), 53.0, 1.0);
    EXPECT_NEAR(*sum.cancellation_pct(), 45.0, 1.0);
}
