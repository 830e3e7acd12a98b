// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "lobkit/event_study.hpp"
#include "lobkit/replay.hpp"
#include "lobkit/rng.hpp"
#include "lobkit/stats.hpp"
#include "lobkit/tape.hpp"
#include "lobkit/zi_sim.hpp"

using namespace lobkit;

namespace {

struct Fixture {
    SimOutput sim;
    FlowTape tape;
    LagGrid grid = LagGrid::logarithmic(1e-7, 10.0);
    DaySession session;
    EventSet set;
    TrajectoryBatch batch;

    Fixture() {
        ZiConfig cfg;
        cfg.limit_rate = 4.0;
        cfg.market_rate = 1.0;
        cfg.cancel_rate = 0.04;
        sim = simulate_day(cfg);
        tape = build_tape(sim.messages);
        set = select_event_set(detect_market_orders(tape), 0, true, Horizon::After, session);
        batch = compute_trajectories(tape, set, grid, TrajectoryMode::Strict, session);
    }
};

const Fixture& fixture() {
    static const Fixture f;
    return f;
}

std::vector<double> sample(std::size_t n) {
    CounterRng rng(3);
    std::vector<double> xs(n);
    for (double& x : xs) x = static_cast<double>(rng.below(2000)) - 1000.0;
    return xs;
}

void BM_BootstrapSerial(benchmark::State& state) {
    const auto xs = sample(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(bootstrap_stderr_serial(xs, 10'000, 1));
}

void BM_BootstrapParallel(benchmark::State& state) {
    const auto xs = sample(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(bootstrap_stderr(xs, 10'000, 1));
}

void BM_TrajectoriesSerial(benchmark::State& state) {
    const Fixture& f = fixture();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            compute_trajectories_serial(f.tape, f.set, f.grid, TrajectoryMode::Strict, f.session));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.set.size()));
}

void BM_TrajectoriesParallel(benchmark::State& state) {
    const Fixture& f = fixture();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            compute_trajectories(f.tape, f.set, f.grid, TrajectoryMode::Strict, f.session));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.set.size()));
}

void BM_AggregateSerial(benchmark::State& state) {
    const Fixture& f = fixture();
    const AggregateOptions opts{static_cast<std::size_t>(state.range(0)), 1, 0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            aggregate_serial(f.batch.same, f.grid, CurveSide::Same, Horizon::After, opts));
    }
}

void BM_AggregateParallel(benchmark::State& state) {
    const Fixture& f = fixture();
    const AggregateOptions opts{static_cast<std::size_t>(state.range(0)), 1, 0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(aggregate(f.batch.same, f.grid, CurveSide::Same, Horizon::After, opts));
    }
}

void BM_Replay(benchmark::State& state) {
    const Fixture& f = fixture();
    for (auto _ : state) {
        Book book;
        Replayer replayer(book);
        std::size_t steps = 0;
        for (const RawMessage& m : f.sim.messages) steps += replayer.apply(m).has_value();
        benchmark::DoNotOptimize(steps);
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.sim.messages.size()));
}

void BM_BuildTape(benchmark::State& state) {
    const Fixture& f = fixture();
    for (auto _ : state) benchmark::DoNotOptimize(build_tape(f.sim.messages));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * f.sim.messages.size()));
}

}  // namespace

BENCHMARK(BM_BootstrapSerial)->Arg(1'000)->Arg(100'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BootstrapParallel)->Arg(1'000)->Arg(100'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrajectoriesSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrajectoriesParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AggregateSerial)->Arg(0)->Arg(1'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AggregateParallel)->Arg(0)->Arg(1'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Replay)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BuildTape)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
