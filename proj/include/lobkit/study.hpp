#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "lobkit/config.hpp"
#include "lobkit/event_study.hpp"
#include "lobkit/tape.hpp"

namespace lobkit {

/// Analytical failure of a study run, such as an empty event set.
class StudyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters of one event-study run.
struct StudyConfig {
    std::string stock{"SIM"};
    double separation_s{0.0};  ///< T
    double tau_min_s{1e-7};
    double tau_max_s{10.0};
    int per_decade{20};
    TrajectoryMode mode{TrajectoryMode::Strict};
    std::size_t bins{0};  ///< size bins; 0 disables the partition
    std::size_t bootstrap_B{10'000};
    std::uint64_t seed{1};
    bool normalize{true};
    Timestamp session_open{Timestamp::from_seconds(34'200)};
    Timestamp session_close{Timestamp::from_seconds(57'600)};
    double session_trim_s{1000.0};
    Price tick{kDefaultTick};

    std::int64_t separation_ns() const;
    /// Strict runs keep price-maintaining market orders only.
    bool maintaining_only() const { return mode == TrajectoryMode::Strict; }
    DaySession session(const std::string& date = {}) const;
    LagGrid grid() const { return LagGrid::logarithmic(tau_min_s, tau_max_s, per_decade); }

    void validate() const;
    static StudyConfig from_config(const KvConfig& cfg);
    KvConfig to_config() const;
    static const std::set<std::string>& keys();
};

struct StudyCurve {
    std::string name;  ///< e.g. same_after, opposite_before_bin3
    AggregateCurve curve;
    std::optional<std::size_t> bin;  ///< 1-based
};

struct StudyResult {
    std::vector<StudyCurve> curves;
    std::size_t days{0};
    std::size_t events_after{0};
    std::size_t events_before{0};
    std::optional<double> basis;            ///< pooled time-weighted best-queue volume
    std::vector<Shares> thresholds_after;   ///< size-bin upper bounds
    std::vector<Shares> thresholds_before;
    bool degenerate_bins{false};
};

/// Accumulates trajectories day by day, then aggregates. Days must be added
/// in a fixed order (the command sorts them by date) for reproducible
/// bootstrap draws.
class StudyAccumulator {
public:
    explicit StudyAccumulator(StudyConfig cfg);

    void add_day(const FlowTape& tape, const std::string& date = {});

    /// Throws StudyError if either event set is empty or the partition or
    /// normalization is impossible.
    StudyResult finish() const;

    const StudyConfig& config() const { return cfg_; }
    const LagGrid& grid() const { return grid_; }

private:
    struct HorizonData {
        TrajectoryBatch batch;
        std::vector<Shares> sizes;
    };

    StudyConfig cfg_;
    LagGrid grid_;
    HorizonData after_;
    HorizonData before_;
    VolumeIntegral volume_;
    std::size_t days_{0};
};

}  // namespace lobkit
