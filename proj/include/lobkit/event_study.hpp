#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lobkit/book.hpp"
#include "lobkit/replay.hpp"
#include "lobkit/tape.hpp"

namespace lobkit {

/// A market order reconstructed from the fills it produced.
struct MarketOrderEvent {
    Timestamp t;
    Side direction{Side::Buy};  ///< aggressor side
    Shares total_shares{0};
    bool price_maintaining{false};
    std::vector<Fill> fills;
    std::size_t first_entry{0};  ///< tape index of the first fill
    std::size_t last_entry{0};   ///< tape index of the last fill
};

/// Groups runs of consecutive visible executions that share a timestamp and
/// a resting side into market orders.
std::vector<MarketOrderEvent> detect_market_orders(const FlowTape& tape);

enum class Horizon : std::uint8_t { After, Before };

/// Market orders kept for one side of the study. For Horizon::After the gap
/// is the time to the next market order; for Horizon::Before it is the time
/// since the previous one.
struct EventSet {
    std::vector<MarketOrderEvent> events;
    std::vector<std::int64_t> gaps_ns;
    std::int64_t separation_ns{0};
    bool maintaining_only{true};
    Horizon horizon{Horizon::After};

    std::size_t size() const { return events.size(); }
};

/// Keeps event i iff its gap is at least `separation_ns` and, when
/// `maintaining_only`, it is price-maintaining. Events without a successor
/// (After) or predecessor (Before) are dropped. Gaps are measured over the
/// full list; `session`, when given, then drops events outside its window.
EventSet select_event_set(std::span<const MarketOrderEvent> events, std::int64_t separation_ns,
                          bool maintaining_only, Horizon horizon = Horizon::After,
                          const std::optional<DaySession>& session = std::nullopt);

/// Positive lags, ascending, with their nanosecond equivalents.
struct LagGrid {
    std::vector<double> seconds;
    std::vector<std::int64_t> ns;

    std::size_t size() const { return ns.size(); }

    /// 10^(log10(min) + j / per_decade) for j = 0, 1, ... up to max.
    static LagGrid logarithmic(double min_s, double max_s, int per_decade = 20);
};

enum class TrajectoryMode : std::uint8_t { Strict, Relaxed };
enum class CurveSide : std::uint8_t { Same, Opposite };

enum class StopReason : std::uint8_t {
    Horizon,      ///< every lag is defined
    Separation,   ///< the neighbouring market order bounds the window
    QuoteChange,  ///< strict mode met a best-price change
    Session,      ///< the trading window ends
    Halt,
};

/// Cumulative net flow at one best queue, sampled on a lag grid. Only the
/// first w.size() lags are defined; lags past that are excluded from means.
struct Trajectory {
    std::vector<std::int64_t> w;
    StopReason stop{StopReason::Horizon};
    std::int64_t gap_ns{0};
    Shares event_size{0};
    Side direction{Side::Buy};
};

struct TrajectoryPair {
    Trajectory same;
    Trajectory opposite;
};

/// Flow in (t, t + tau] measured from the book left after every entry
/// stamped t. Strict mode counts flow at the fixed best prices and stops at
/// the first entry that moves either quote; relaxed mode counts any flow at
/// the prevailing best (including in-spread arrivals and the departures that
/// empty a queue) for the whole window.
TrajectoryPair trajectory_after(const FlowTape& tape, const MarketOrderEvent& event,
                                std::int64_t gap_ns, const LagGrid& grid, TrajectoryMode mode,
                                const DaySession& session);

/// Mirror image: flow in (t - tau, t) measured against the book in force just
/// before the first entry stamped t.
TrajectoryPair trajectory_before(const FlowTape& tape, const MarketOrderEvent& event,
                                 std::int64_t gap_ns, const LagGrid& grid, TrajectoryMode mode,
                                 const DaySession& session);

struct TrajectoryBatch {
    std::vector<Trajectory> same;
    std::vector<Trajectory> opposite;

    void append(TrajectoryBatch&& other);
    const std::vector<Trajectory>& of(CurveSide s) const {
        return s == CurveSide::Same ? same : opposite;
    }
};

/// Trajectories for every member of `set`, in member order (OpenMP).
TrajectoryBatch compute_trajectories(const FlowTape& tape, const EventSet& set,
                                     const LagGrid& grid, TrajectoryMode mode,
                                     const DaySession& session);

/// Single-threaded reference for compute_trajectories.
TrajectoryBatch compute_trajectories_serial(const FlowTape& tape, const EventSet& set,
                                            const LagGrid& grid, TrajectoryMode mode,
                                            const DaySession& session);

/// Exact per-lag totals; merging is associative and commutative.
struct CurveTotals {
    std::vector<std::int64_t> sum;
    std::vector<std::int64_t> n;

    explicit CurveTotals(std::size_t lags = 0) : sum(lags, 0), n(lags, 0) {}
    void add(const Trajectory& t);
    void merge(const CurveTotals& other);
    std::optional<double> mean(std::size_t k) const;

    bool operator==(const CurveTotals&) const = default;
};

struct AggregateOptions {
    std::size_t bootstrap_B{0};  ///< 0 skips the bootstrap
    std::uint64_t seed{0};
    std::uint64_t curve_id{0};   ///< decorrelates the per-lag seeds of different curves
};

/// Mean flow per lag over the trajectories defined there. Lags where no
/// trajectory is defined have no mean and no error.
struct AggregateCurve {
    CurveSide side{CurveSide::Same};
    Horizon horizon{Horizon::After};
    std::vector<double> tau_s;
    CurveTotals totals;
    std::vector<std::optional<double>> mean;
    std::vector<std::optional<double>> std_error;
    double basis{1.0};  ///< divisor already applied to mean and std_error
    std::size_t bootstrap_B{0};
    std::uint64_t seed{0};

    std::size_t size() const { return tau_s.size(); }
};

/// OpenMP over lags; each lag's bootstrap uses lag_seed(seed, curve_id, k).
AggregateCurve aggregate(std::span<const Trajectory> trajectories, const LagGrid& grid,
                         CurveSide side, Horizon horizon, const AggregateOptions& options);

/// Single-threaded reference for aggregate; bit-identical results.
AggregateCurve aggregate_serial(std::span<const Trajectory> trajectories, const LagGrid& grid,
                                CurveSide side, Horizon horizon, const AggregateOptions& options);

/// Divides means and errors by `basis` (> 0).
AggregateCurve normalize(const AggregateCurve& curve, double basis);

/// Equal-count size bins. Threshold j (1-based) is the ceil(j N / bins)-th
/// smallest size; an event goes to the first bin whose threshold is >= its
/// size, so ties land in the lower bin.
struct SizePartition {
    std::vector<std::vector<std::size_t>> bins;  ///< indices into the input
    std::vector<Shares> thresholds;              ///< bins - 1 upper bounds
    bool degenerate{false};                      ///< some bin is empty
};

SizePartition partition_by_size(std::span<const Shares> sizes, std::size_t bins = 5);

std::string to_string(TrajectoryMode m);
std::string to_string(CurveSide s);
std::string to_string(Horizon h);
std::string to_string(StopReason r);
TrajectoryMode parse_mode(const std::string& text);

}  // namespace lobkit
