// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion
// numbers as arguments to run a subset.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "commands.hpp"
#include "lobkit/event_study.hpp"
#include "lobkit/messages.hpp"
#include "lobkit/replay.hpp"
#include "lobkit/rng.hpp"
#include "lobkit/stats.hpp"
#include "lobkit/zi_sim.hpp"
#include "support/oracle_sequences.hpp"
#include "support/volume_oracle.hpp"

using namespace lobkit;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v, int precision = 3) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(precision);
    s << v;
    return s.str();
}

struct CliRun {
    int code;
    std::string out;
    std::string err;
};

CliRun lobkit_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::string> snapshot_dir(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) files[e.path().filename().string()] = slurp(e.path());
    return files;
}

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "lobkit_acceptance";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string work(const std::string& name) { return (work_dir() / name).string(); }

/// A simulated day with plenty of market orders and quote changes.
ZiConfig busy_day(std::uint64_t seed) {
    ZiConfig cfg;
    cfg.limit_rate = 3.0;
    cfg.market_rate = 1.0;
    cfg.cancel_rate = 0.08;
    cfg.band_levels = 4;
    cfg.initial_levels = 4;
    cfg.initial_orders_per_level = 3;
    cfg.horizon_s = 3000.0;
    cfg.seed = seed;
    return cfg;
}

Outcome matching_oracle() {
    Stopwatch sw;
    std::size_t trades = 0;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
        const oracle::OracleRun run = oracle::run_oracle_sequence(seed, 10'000, 10, 10);
        if (!run.ok()) return {false, "sequence " + std::to_string(seed) + ": " + run.detail};
        trades += run.trades;
    }
    const double t = sw.seconds();
    return {t < 60.0, "1000 x 10^4 events, " + std::to_string(trades) + " trades, identical tapes and books in " +
                          fmt(t, 1) + " s (limit 60 s)"};
}

Outcome replay_consistency() {
    double validate_s = 0.0;
    std::size_t total = 0;
    for (int day = 1; day <= 20; ++day) {
        const std::string dir = work("validate_day");
        const CliRun sim = lobkit_cli({"simulate", "--limit-rate", "2.2", "--cancel-rate", "0.022",
                                       "--market-rate", "0.5", "--seed", std::to_string(day),
                                       "--out-dir", dir});
        if (sim.code != 0) return {false, "simulate failed: " + sim.err};
        const std::size_t messages = parse_messages(slurp(dir + "/messages.csv")).size();
        if (messages < 1'000'000) return {false, "day " + std::to_string(day) + " has only " +
                                                     std::to_string(messages) + " messages"};
        total += messages;
        Stopwatch sw;
        const CliRun v = lobkit_cli({"validate", "--messages", dir + "/messages.csv", "--snapshots",
                                     dir + "/orderbook.csv", "--levels", "5"});
        validate_s += sw.seconds();
        fs::remove_all(dir);
        if (v.code != 0) return {false, "day " + std::to_string(day) + " exit " + std::to_string(v.code) + ": " + v.out};
    }
    return {validate_s < 60.0, "20 days, " + std::to_string(total) +
                                   " messages, all exit 0 with zero mismatches; validation took " +
                                   fmt(validate_s, 1) + " s (limit 60 s)"};
}

Outcome flow_exactness() {
    const ZiConfig cfg = busy_day(31);
    const SimOutput out = simulate_day(cfg);
    const FlowTape tape = build_tape(out.messages);
    const LagGrid grid = LagGrid::logarithmic(1e-7, 10.0);
    DaySession session;
    session.open = cfg.start;
    session.close = cfg.start + static_cast<std::int64_t>(cfg.horizon_s * 1e9);
    session.trim_ns = 100'000'000'000;
    const EventSet set = select_event_set(detect_market_orders(tape), 0, true, Horizon::After, session);
    const TrajectoryBatch batch = compute_trajectories(tape, set, grid, TrajectoryMode::Strict, session);

    std::vector<std::pair<std::size_t, std::size_t>> defined;
    for (std::size_t i = 0; i < set.size(); ++i) {
        for (std::size_t k = 0; k < batch.same[i].w.size(); ++k) defined.emplace_back(i, k);
    }
    if (defined.size() < 10'000) return {false, "only " + std::to_string(defined.size()) + " defined pairs"};
    CounterRng rng(derive_key(77, 0));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<std::int64_t> times;
    for (int p = 0; p < 10'000; ++p) {
        const auto [i, k] = defined[rng.below(defined.size())];
        pairs.emplace_back(i, k);
        times.push_back(set.events[i].t.ns);
        times.push_back(set.events[i].t.ns + grid.ns[k]);
    }
    const auto q = oracle::quotes_at(out.messages, times);
    std::size_t nonzero = 0;
    for (std::size_t p = 0; p < pairs.size(); ++p) {
        const auto [i, k] = pairs[p];
        const Side same = opposite(set.events[i].direction);
        const Side opp = set.events[i].direction;
        const std::int64_t ws = q[2 * p + 1].volume(same) - q[2 * p].volume(same);
        const std::int64_t wo = q[2 * p + 1].volume(opp) - q[2 * p].volume(opp);
        if (!q[2 * p].same_prices(q[2 * p + 1]) || batch.same[i].w[k] != ws ||
            batch.opposite[i].w[k] != wo) {
            return {false, "mismatch at event " + std::to_string(i) + ", lag " + std::to_string(k)};
        }
        if (ws != 0) ++nonzero;
    }
    return {true, "10000 sampled (event, tau) pairs exact on both queues; " + std::to_string(nonzero) +
                      " with nonzero same-side flow"};
}

std::vector<std::pair<double, std::optional<double>>> curve_means(const fs::path& csv) {
    std::istringstream in(slurp(csv));
    std::string line;
    std::getline(in, line);
    std::vector<std::pair<double, std::optional<double>>> rows;
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string tau, mean;
        std::getline(ss, tau, ',');
        std::getline(ss, mean, ',');
        rows.emplace_back(std::stod(tau), mean.empty() ? std::nullopt : std::optional(std::stod(mean)));
    }
    return rows;
}

Outcome latency_phase() {
    const std::string sim = work("latency_sim");
    const CliRun s = lobkit_cli({"simulate", "--limit-rate", "80", "--market-rate", "4", "--cancel-rate",
                                 "0.4", "--horizon", "3000", "--latency-floor-ns", "1000", "--levels",
                                 "1", "--out-dir", sim});
    if (s.code != 0) return {false, "simulate failed: " + s.err};
    const std::string study = work("latency_study");
    const CliRun st = lobkit_cli({"study", "--messages", sim + "/messages.csv", "--session-trim", "100",
                                  "--bootstrap-B", "100", "--out-dir", study});
    if (st.code != 0) return {false, "study failed: " + st.err};
    std::size_t zeros = 0;
    for (const char* name : {"same_after", "opposite_after", "same_before", "opposite_before"}) {
        for (const auto& [tau, mean] : curve_means(fs::path(study) / (std::string(name) + ".csv"))) {
            if (std::abs(tau) >= 1e-6) continue;
            if (!mean || *mean != 0.0) {
                return {false, std::string(name) + " at tau " + std::to_string(tau) + " is not exactly 0"};
            }
            ++zeros;
        }
    }
    const CliRun e = lobkit_cli({"ecdf", "--messages", sim + "/messages.csv", "--session-trim", "100"});
    if (e.code != 0) return {false, "ecdf failed: " + e.err};
    const std::string first = e.out.substr(e.out.find('\n') + 1);
    const double min_gap = std::stod(first.substr(0, first.find(',')));
    if (zeros != 80) return {false, "expected 80 sub-floor lags, saw " + std::to_string(zeros)};
    return {min_gap >= 1e-6, "all 4 curves exactly 0 at the 20 lags below 1e-6 s; minimum ECDF "
                             "inter-arrival " + std::to_string(min_gap) + " s"};
}

Outcome statistical_null() {
    std::size_t lags = 0;
    std::size_t within = 0;
    std::size_t exact_zero = 0;
    std::size_t within_net = 0;
    const LagGrid grid = LagGrid::logarithmic(1e-7, 10.0);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        ZiConfig cfg;
        cfg.seed = seed;
        const SimOutput out = simulate_day(cfg);
        const FlowTape tape = build_tape(out.messages);
        DaySession session;
        const EventSet set =
            select_event_set(detect_market_orders(tape), 0, true, Horizon::Before, session);
        const TrajectoryBatch batch =
            compute_trajectories(tape, set, grid, TrajectoryMode::Strict, session);
        const AggregateCurve c =
            aggregate(batch.same, grid, CurveSide::Same, Horizon::Before, {10'000, seed, 2});
        // A window is included only if no other market order falls inside
        // it, so included windows miss the same-direction market-order
        // depletion that an unconditioned window would carry.
        const double depletion = cfg.market_rate * cfg.order_sizes.mean();
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (!c.mean[k]) continue;
            ++lags;
            const double m = *c.mean[k];
            const double se = *c.std_error[k];
            if (m == 0.0 && se == 0.0) {
                ++exact_zero;
                ++within;
                ++within_net;
                continue;
            }
            if (std::abs(m) < 3.0 * se) ++within;
            if (std::abs(m - depletion * grid.seconds[k]) < 3.0 * se) ++within_net;
        }
    }
    const double frac = static_cast<double>(within) / static_cast<double>(lags);
    return {frac >= 0.95, std::to_string(within) + "/" + std::to_string(lags) + " lags (" +
                              fmt(100.0 * frac, 1) + "%) with |mean| < 3 stderr over 10 seeds, " +
                              std::to_string(exact_zero) + " of them exactly 0 (limit 95%); " +
                              fmt(100.0 * static_cast<double>(within_net) / static_cast<double>(lags), 1) +
                              "% after removing the excluded market-order depletion"};
}

Outcome bootstrap_calibration() {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 gen(seed);
        std::normal_distribution<double> normal;
        std::vector<double> xs(1000);
        for (double& x : xs) x = normal(gen);
        double mean = 0.0;
        for (double x : xs) mean += x;
        mean /= 1000.0;
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        const double classical = std::sqrt(ss / 999.0 / 1000.0);
        const double se = bootstrap_stderr(xs, 10'000, seed).std_error;
        worst = std::max(worst, std::abs(se / classical - 1.0));
    }
    return {worst < 0.10, "worst relative deviation from s/sqrt(n) over 20 seeds: " +
                              fmt(100.0 * worst, 2) + "% (limit 10%)"};
}

std::map<std::string, std::string> parse_table(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        if (comma != std::string::npos) out[line.substr(0, comma)] = line.substr(comma + 1);
    }
    return out;
}

Outcome event_mix() {
    // One deep level per side keeps every event at the best quotes; 900000
    // resting orders at 5e-5 per order give 45 cancellations per second
    // against 53 limit and 2 market arrivals.
    const std::string sim = work("mix_sim");
    const CliRun s = lobkit_cli({"simulate", "--band-levels", "1", "--set", "initial_levels=1", "--set",
                                 "initial_orders_per_level=450000", "--limit-rate", "26.5",
                                 "--market-rate", "1", "--cancel-rate", "0.00005", "--horizon", "1200",
                                 "--levels", "1", "--out-dir", sim});
    if (s.code != 0) return {false, "simulate failed: " + s.err};
    const CliRun r = lobkit_cli({"scan", "--messages", sim + "/messages.csv", "--session-open", "34200",
                                 "--session-close", "35400", "--session-trim", "100"});
    fs::remove_all(sim);
    if (r.code != 0) return {false, "scan failed: " + r.err};
    auto t = parse_table(r.out);
    const double m = std::stod(t["market_order_pct"]);
    const double l = std::stod(t["limit_arrival_pct"]);
    const double c = std::stod(t["cancellation_pct"]);
    const bool ok = std::abs(m - 2.0) <= 1.0 && std::abs(l - 53.0) <= 1.0 && std::abs(c - 45.0) <= 1.0;
    return {ok, "market " + fmt(m, 2) + "%, limit " + fmt(l, 2) + "%, cancel " + fmt(c, 2) +
                    "% of " + t["events_at_best"] + " events (target 2/53/45 +- 1)"};
}

Outcome quintiles() {
    const std::vector<Shares> small{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const SizePartition p = partition_by_size(small, 5);
    for (std::size_t b = 0; b < 5; ++b) {
        std::set<Shares> got;
        for (std::size_t i : p.bins[b]) got.insert(small[i]);
        const std::set<Shares> want{static_cast<Shares>(2 * b + 1), static_cast<Shares>(2 * b + 2)};
        if (got != want) return {false, "sizes 1..10 bin " + std::to_string(b + 1) + " is wrong"};
    }
    ZiConfig cfg;
    cfg.order_sizes = SizeDistribution::uniform(1, 1'000'000'000);
    cfg.seed = 5;
    const SimOutput out = simulate_day(cfg);
    std::vector<Shares> sizes;
    for (const auto& mo : detect_market_orders(build_tape(out.messages))) sizes.push_back(mo.total_shares);
    const SizePartition q = partition_by_size(sizes, 5);
    const double target = static_cast<double>(sizes.size()) / 5.0;
    std::string counts;
    bool ok = !q.degenerate;
    for (const auto& bin : q.bins) {
        ok = ok && std::abs(static_cast<double>(bin.size()) - target) <= 1.0;
        counts += (counts.empty() ? "" : ",") + std::to_string(bin.size());
    }
    return {ok, "sizes 1..10 split {1,2}..{9,10}; " + std::to_string(sizes.size()) +
                    " simulated market orders split " + counts};
}

Outcome normalization() {
    const LagGrid grid = LagGrid::logarithmic(1e-7, 10.0);
    for (const auto& [basis, value] : {std::pair{5131.0, 5131}, std::pair{11423.0, 11423}}) {
        Trajectory t;
        t.w.assign(grid.size(), value);
        const AggregateCurve c = aggregate(std::vector<Trajectory>{t, t, t}, grid, CurveSide::Same,
                                           Horizon::After, {100, 1, 0});
        const AggregateCurve n = normalize(c, basis);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (!n.mean[k] || *n.mean[k] != 1.0 || *n.std_error[k] != 0.0) {
                return {false, "basis " + fmt(basis, 0) + " lag " + std::to_string(k) + " not exactly 1"};
            }
        }
    }
    return {true, "5131/5131 and 11423/11423 give exactly 1.0 at all 161 lags"};
}

class MessageFileSink : public SimSink {
public:
    explicit MessageFileSink(const std::string& path) : out_(path, std::ios::binary) {}
    void on_message(const RawMessage& msg, const Book&) override {
        append_message(buf_, msg);
        ++count_;
        if (buf_.size() > (1u << 22)) flush();
    }
    void flush() {
        out_.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
        buf_.clear();
    }
    std::size_t count() const { return count_; }

private:
    std::ofstream out_;
    std::string buf_;
    std::size_t count_{0};
};

Outcome performance() {
    const std::string dir = work("perf");
    fs::create_directories(dir);
    const std::string file = dir + "/SIM_2020-01-02_34200000_57600000_message_1.csv";
    ZiConfig cfg;
    cfg.limit_rate = 21.5;
    cfg.market_rate = 2.0;
    cfg.cancel_rate = 0.2;
    cfg.seed = 10;
    {
        MessageFileSink sink(file);
        simulate_day(cfg, sink);
        sink.flush();
        if (sink.count() < 10'000'000) return {false, "day has only " + std::to_string(sink.count()) + " messages"};
    }
    double replay_rate = 0.0;
    std::size_t n = 0;
    {
        std::ifstream in(file, std::ios::binary);
        const std::vector<RawMessage> msgs = parse_messages(in);
        n = msgs.size();
        Book book;
        Replayer replayer(book);
        Stopwatch sw;
        std::size_t steps = 0;
        for (const RawMessage& m : msgs) steps += replayer.apply(m).has_value();
        replay_rate = static_cast<double>(n) / sw.seconds();
        if (steps == 0) return {false, "no replay steps"};
    }
    double file_rate = 0.0;
    {
        std::ifstream in(file, std::ios::binary);
        MessageReader reader(in);
        Stopwatch sw;
        const FlowTape tape = build_tape(reader);
        file_rate = static_cast<double>(tape.messages) / sw.seconds();
    }
    Stopwatch sw;
    const CliRun r = lobkit_cli({"study", "--messages", file, "--out-dir", dir + "/study"});
    const double study_s = sw.seconds();
    fs::remove_all(dir);
    if (r.code != 0) return {false, "study failed: " + r.err};
    const bool ok = replay_rate >= 1e6 && study_s < 120.0;
    return {ok, std::to_string(n) + " messages; in-memory replay " + fmt(replay_rate / 1e6, 2) +
                    "M msg/s, parse+replay from file " + fmt(file_rate / 1e6, 2) +
                    "M msg/s; cmd_study (B = 10000) " + fmt(study_s, 1) + " s (limits 1M msg/s, 120 s)"};
}

Outcome determinism() {
    auto twice = [](const std::vector<std::string>& args, const std::string& out_dir) {
        std::vector<std::map<std::string, std::string>> files;
        std::vector<std::string> streams;
        for (int i = 0; i < 2; ++i) {
            if (!out_dir.empty()) fs::remove_all(out_dir);
            const CliRun r = lobkit_cli(args);
            streams.push_back(std::to_string(r.code) + "\n" + r.out + "\n" + r.err);
            if (!out_dir.empty()) files.push_back(snapshot_dir(out_dir));
        }
        return streams[0] == streams[1] && (files.empty() || files[0] == files[1]);
    };
    const std::string sim = work("det_sim");
    const std::vector<std::string> sim_args{"simulate", "--seed", "42", "--horizon", "4000",
                                            "--market-rate", "0.5", "--out-dir", sim};
    if (!twice(sim_args, sim)) return {false, "simulate differs"};
    const std::string msgs = sim + "/messages.csv";
    if (!twice({"validate", "--messages", msgs, "--snapshots", sim + "/orderbook.csv", "--levels", "5"}, ""))
        return {false, "validate differs"};
    if (!twice({"scan", "--messages", msgs, "--session-trim", "100"}, "")) return {false, "scan differs"};
    const std::string st = work("det_study");
    if (!twice({"study", "--messages", msgs, "--session-trim", "100", "--bins", "5", "--bootstrap-B",
                "500", "--seed", "9", "--out-dir", st},
               st))
        return {false, "study differs"};
    const std::string rel = work("det_relaxed");
    if (!twice({"study", "--messages", msgs, "--session-trim", "100", "--mode", "relaxed",
                "--bootstrap-B", "500", "--out-dir", rel},
               rel))
        return {false, "relaxed study differs"};
    if (!twice({"ecdf", "--messages", msgs, "--shifted"}, "")) return {false, "ecdf differs"};
    return {true, "simulate, validate, scan, study (strict with bins, relaxed) and ecdf reruns are "
                  "byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"matching-oracle equivalence", matching_oracle},
        {"replay consistency", replay_consistency},
        {"net-flow exactness", flow_exactness},
        {"platform-latency phase", latency_phase},
        {"ZI statistical null", statistical_null},
        {"bootstrap calibration", bootstrap_calibration},
        {"event-mix reproduction", event_mix},
        {"quintile partition", quintiles},
        {"normalization fixture", normalization},
        {"performance", performance},
        {"determinism", determinism},
    };
    std::set<int> only;
    for (int i = 1; i < argc; ++i) only.insert(std::atoi(argv[i]));
    bool all = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i + 1);
        if (!only.empty() && !only.contains(id)) continue;
        Stopwatch sw;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        all = all && o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << criteria[i].first
                  << "): " << o.detail << " [" << fmt(sw.seconds(), 1) << " s]" << std::endl;
    }
    fs::remove_all(work_dir());
    return all ? 0 : 1;
}
