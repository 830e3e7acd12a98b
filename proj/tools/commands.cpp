#include "commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <regex>
#include <set>
#include <sstream>

#include "lobkit/curve_io.hpp"
#include "lobkit/messages.hpp"
#include "lobkit/replay.hpp"
#include "lobkit/scan.hpp"
#include "lobkit/stats.hpp"
#include "lobkit/study.hpp"
#include "lobkit/tape.hpp"
#include "lobkit/zi_sim.hpp"

namespace lobkit::cli {

namespace fs = std::filesystem;

namespace {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

void check_keys(const KvConfig& run, const std::set<std::string>& allowed, const char* command) {
    const auto unknown = run.unknown_keys(allowed);
    if (unknown.empty()) return;
    std::string names;
    for (const auto& k : unknown) names += (names.empty() ? "" : ", ") + k;
    throw ConfigError(std::string("unknown keys for ") + command + ": " + names);
}

std::set<std::string> with(std::set<std::string> base, std::initializer_list<const char*> more) {
    for (const char* k : more) base.insert(k);
    return base;
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "'");
    return in;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f || !f.write(content.data(), static_cast<std::streamsize>(content.size())) || !f.flush()) {
        throw IoError("cannot write '" + path.string() + "'");
    }
}

std::optional<fs::path> output_dir(const KvConfig& run, bool required) {
    const auto dir = run.get("out_dir");
    if (!dir || dir->empty()) {
        if (required) throw UsageError("--out-dir is required");
        return std::nullopt;
    }
    std::error_code ec;
    fs::create_directories(*dir, ec);
    if (ec) throw IoError("cannot create '" + *dir + "': " + ec.message());
    return fs::path(*dir);
}

/// Writes the effective configuration next to the outputs, or to `err`
/// when the command has no output directory.
void echo_config(const KvConfig& effective, const std::optional<fs::path>& dir, std::ostream& err) {
    if (dir) {
        write_file(*dir / "config.txt", effective.serialize());
    } else {
        err << "# effective config\n" << effective.serialize();
    }
}

struct DayFile {
    std::string date;
    std::string path;
};

std::vector<DayFile> day_files(const KvConfig& run) {
    const auto paths = run.get_list("messages");
    if (paths.empty()) throw UsageError("--messages is required");
    std::vector<DayFile> days;
    for (const auto& p : paths) days.push_back({date_from_path(p), p});
    std::sort(days.begin(), days.end(), [](const DayFile& a, const DayFile& b) {
        return std::tie(a.date, a.path) < std::tie(b.date, b.path);
    });
    return days;
}

std::string join_paths(const std::vector<DayFile>& days) {
    std::string s;
    for (const auto& d : days) s += (s.empty() ? "" : ",") + d.path;
    return s;
}

FlowTape read_tape(const DayFile& day, Price tick) {
    std::ifstream in = open_input(day.path);
    MessageReader reader(in);
    return build_tape(reader, tick);
}

struct SessionOptions {
    Timestamp open{Timestamp::from_seconds(34'200)};
    Timestamp close{Timestamp::from_seconds(57'600)};
    double trim_s{1000.0};

    DaySession session(const std::string& date) const {
        DaySession s;
        s.date = date;
        s.open = open;
        s.close = close;
        s.trim_ns = std::llround(trim_s * 1e9);
        return s;
    }
};

const std::set<std::string> kSessionKeys{"session_open", "session_close", "session_trim"};

SessionOptions read_session(const KvConfig& run) {
    SessionOptions s;
    for (auto [key, field] : {std::pair{"session_open", &s.open}, std::pair{"session_close", &s.close}}) {
        if (const auto v = run.get(key)) {
            try {
                *field = parse_time(*v);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string(key) + ": " + e.what());
            }
        }
    }
    s.trim_s = run.get_double("session_trim", s.trim_s);
    if (!(s.trim_s >= 0.0) || s.session({}).window_length() <= 0) {
        throw ConfigError("session window is empty after trimming");
    }
    return s;
}

void echo_session(KvConfig& c, const SessionOptions& s) {
    c.set("session_open", format_time(s.open));
    c.set("session_close", format_time(s.close));
    c.set("session_trim", format_double(s.trim_s));
}

Price read_tick(const KvConfig& run) {
    const Price tick{run.get_int("tick", kDefaultTick.value)};
    if (tick.value <= 0) throw ConfigError("tick must be positive");
    return tick;
}

std::string opt_text(const std::optional<double>& v) { return v ? format_double(*v) : std::string{}; }

/// Maps exceptions to exit codes.
template <class Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const StudyError& e) {
        err << "error: " << e.what() << '\n';
        return kExitAnalytical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}

}  // namespace

std::string date_from_path(const std::string& path) {
    static const std::regex date(R"((\d{4}-\d{2}-\d{2}))");
    const std::string name = fs::path(path).filename().string();
    std::smatch m;
    return std::regex_search(name, m, date) ? m[1].str() : std::string{};
}

int cmd_validate(const KvConfig& run, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        check_keys(run, {"messages", "snapshots", "levels", "tick", "max_report"}, "validate");
        const auto msgs = run.get("messages");
        const auto snaps = run.get("snapshots");
        if (!msgs || !snaps) throw UsageError("validate needs --messages and --snapshots");
        const auto levels = static_cast<std::size_t>(run.get_uint("levels", 10));
        if (levels == 0) throw ConfigError("levels must be positive");
        const auto max_report = static_cast<std::size_t>(run.get_uint("max_report", 10));
        const Price tick = read_tick(run);

        KvConfig effective;
        effective.set("messages", *msgs);
        effective.set("snapshots", *snaps);
        effective.set("levels", std::to_string(levels));
        effective.set("tick", std::to_string(tick.value));
        effective.set("max_report", std::to_string(max_report));
        echo_config(effective, std::nullopt, err);

        std::ifstream min = open_input(*msgs);
        std::ifstream sin = open_input(*snaps);
        MessageReader mr(min);
        SnapshotReader sr(sin, levels);
        ValidationReport report;
        try {
            report = validate_snapshots(mr, sr, levels, max_report, tick);
        } catch (const BookError& e) {
            out << "replay failed: " << e.what() << '\n';
            return kExitAnalytical;
        } catch (const ParseError&) {
            throw;
        } catch (const std::invalid_argument& e) {
            out << "streams disagree: " << e.what() << '\n';
            return kExitAnalytical;
        }
        out << report.describe();
        return report.ok() ? kExitOk : kExitAnalytical;
    });
}

int cmd_scan(const KvConfig& run, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        check_keys(run, with(kSessionKeys, {"messages", "tick", "out_dir"}), "scan");
        const auto days = day_files(run);
        const SessionOptions so = read_session(run);
        const Price tick = read_tick(run);
        const auto dir = output_dir(run, false);

        KvConfig effective;
        effective.set("messages", join_paths(days));
        effective.set("tick", std::to_string(tick.value));
        echo_session(effective, so);
        if (dir) effective.set("out_dir", dir->string());
        echo_config(effective, dir, err);

        ScanSummary total;
        for (const auto& day : days) {
            try {
                total.merge(scan_tape(read_tape(day, tick), so.session(day.date)));
            } catch (const std::invalid_argument&) {
                // nothing inside this day's window
            }
        }
        if (total.events_at_best() == 0) {
            throw StudyError("no events inside the session window");
        }

        std::ostringstream t;
        t << "statistic,value\n"
          << "days," << days.size() << '\n'
          << "events_at_best," << total.events_at_best() << '\n'
          << "market_orders," << total.market_orders << '\n'
          << "limit_arrivals_at_best," << total.limit_arrivals_at_best << '\n'
          << "cancellations_at_best," << total.cancellations_at_best << '\n'
          << "market_order_pct," << opt_text(total.market_order_pct()) << '\n'
          << "limit_arrival_pct," << opt_text(total.limit_arrival_pct()) << '\n'
          << "cancellation_pct," << opt_text(total.cancellation_pct()) << '\n'
          << "limit_arrivals_all_prices," << total.limit_arrivals << '\n'
          << "cancellations_all_prices," << total.cancellations << '\n'
          << "fills," << total.fills << '\n'
          << "price_maintaining_market_orders," << total.price_maintaining << '\n'
          << "mean_spread_usd," << opt_text(total.mean_spread()) << '\n'
          << "mean_trade_price_usd," << opt_text(total.mean_trade_price()) << '\n'
          << "mean_best_volume," << opt_text(total.mean_best_volume()) << '\n'
          << "mean_market_order_size," << opt_text(total.mean_market_order_size()) << '\n'
          << "mean_price_maintaining_size," << opt_text(total.mean_price_maintaining_size()) << '\n';
        out << t.str();
        if (dir) write_file(*dir / "scan.csv", t.str());
        return kExitOk;
    });
}

int cmd_study(const KvConfig& run, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        check_keys(run, with(StudyConfig::keys(), {"messages", "out_dir"}), "study");
        const auto days = day_files(run);
        KvConfig study_keys = run;
        study_keys.erase("messages");
        study_keys.erase("out_dir");
        const StudyConfig cfg = StudyConfig::from_config(study_keys);
        const auto dir = output_dir(run, true);

        KvConfig effective = cfg.to_config();
        effective.set("messages", join_paths(days));
        effective.set("out_dir", dir->string());
        echo_config(effective, dir, err);

        StudyAccumulator acc(cfg);
        for (const auto& day : days) acc.add_day(read_tape(day, cfg.tick), day.date);
        const StudyResult result = acc.finish();

        for (const StudyCurve& c : result.curves) {
            std::ostringstream csv;
            write_curve_csv(csv, c.curve);
            write_file(*dir / (c.name + ".csv"), csv.str());
            write_file(*dir / (c.name + ".json"), curve_json(c, cfg, result));
        }
        nlohmann::ordered_json summary;
        summary["stock"] = cfg.stock;
        summary["days"] = result.days;
        summary["events_after"] = result.events_after;
        summary["events_before"] = result.events_before;
        summary["mean_best_volume"] =
            result.basis ? nlohmann::ordered_json(*result.basis) : nlohmann::ordered_json(nullptr);
        summary["curves"] = nlohmann::ordered_json::array();
        for (const StudyCurve& c : result.curves) summary["curves"].push_back(c.name);
        write_file(*dir / "summary.json", summary.dump(2) + "\n");

        out << "days " << result.days << ", events after " << result.events_after << ", before "
            << result.events_before << ", curves " << result.curves.size() << " -> "
            << dir->string() << '\n';
        return kExitOk;
    });
}

namespace {

class FileSink : public SimSink {
public:
    FileSink(const fs::path& dir, std::size_t levels)
        : messages_(dir / "messages.csv", std::ios::binary | std::ios::trunc),
          book_(dir / "orderbook.csv", std::ios::binary | std::ios::trunc),
          log_(dir / "log.csv", std::ios::binary | std::ios::trunc),
          levels_(levels),
          row_(4 * levels) {
        if (!messages_ || !book_ || !log_) throw IoError("cannot create output files in " + dir.string());
        log_buf_ = "kind,time,side,shares,price,price_maintaining,fills,first_message\n";
    }

    void on_message(const RawMessage& msg, const Book& book) override {
        append_message(msg_buf_, msg);
        snapshot_row(book, levels_, row_);
        append_snapshot_row(book_buf_, row_);
        if (book_buf_.size() > (1u << 22)) flush();
    }

    void on_market_order(const SimMarketOrder& mo) override {
        log_buf_ += "market_order," + format_time(mo.time) + ',' + to_string(mo.direction) + ',' +
                    std::to_string(mo.total_shares) + ',' +
                    std::to_string(mo.fills.front().price.value) + ',' +
                    (mo.price_maintaining ? "1" : "0") + ',' + std::to_string(mo.fills.size()) + ',' +
                    std::to_string(mo.first_message + 1) + '\n';
    }

    void on_reseed(const Reseed& r) override {
        log_buf_ += "reseed," + format_time(r.time) + ',' + to_string(r.side) + ",," +
                    std::to_string(r.price.value) + ",,,\n";
    }

    void flush() {
        write(messages_, msg_buf_);
        write(book_, book_buf_);
        write(log_, log_buf_);
    }

private:
    static void write(std::ofstream& f, std::string& buf) {
        f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (!f) throw IoError("write failed");
        buf.clear();
    }

    std::ofstream messages_;
    std::ofstream book_;
    std::ofstream log_;
    std::size_t levels_;
    std::vector<std::int64_t> row_;
    std::string msg_buf_;
    std::string book_buf_;
    std::string log_buf_;
};

}  // namespace

int cmd_simulate(const KvConfig& run, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        check_keys(run, with(ZiConfig::keys(), {"out_dir"}), "simulate");
        KvConfig sim_keys = run;
        sim_keys.erase("out_dir");
        const ZiConfig cfg = ZiConfig::from_config(sim_keys);
        const auto dir = output_dir(run, true);

        KvConfig effective = cfg.to_config();
        effective.set("out_dir", dir->string());
        echo_config(effective, dir, err);

        FileSink sink(*dir, cfg.snapshot_levels);
        const SimSummary s = simulate_day(cfg, sink);
        sink.flush();
        out << "messages " << s.messages << " (seed rows " << s.seed_messages << "), limit "
            << s.limit_orders << ", market " << s.market_orders << ", cancel " << s.cancellations
            << ", reseeds " << s.reseeds << " -> " << dir->string() << '\n';
        return kExitOk;
    });
}

int cmd_ecdf(const KvConfig& run, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        check_keys(run, with(kSessionKeys, {"messages", "tick", "shifted", "out_dir"}), "ecdf");
        const auto days = day_files(run);
        const SessionOptions so = read_session(run);
        const Price tick = read_tick(run);
        const bool shifted = run.get_bool("shifted", false);
        const auto dir = output_dir(run, false);

        KvConfig effective;
        effective.set("messages", join_paths(days));
        effective.set("tick", std::to_string(tick.value));
        effective.set("shifted", shifted ? "true" : "false");
        echo_session(effective, so);
        if (dir) effective.set("out_dir", dir->string());
        echo_config(effective, dir, err);

        std::vector<double> gaps;
        for (const auto& day : days) {
            const DaySession session = so.session(day.date);
            std::optional<Timestamp> prev;
            for (const auto& mo : detect_market_orders(read_tape(day, tick))) {
                if (!session.contains(mo.t)) continue;
                if (prev) gaps.push_back(static_cast<double>(mo.t - *prev) * 1e-9);
                prev = mo.t;
            }
        }
        if (gaps.empty()) throw StudyError("need at least two market orders inside the session window");
        const Ecdf ecdf = shifted ? Ecdf::min_shifted(std::move(gaps)) : Ecdf(std::move(gaps));
        std::ostringstream csv;
        write_ecdf_csv(csv, ecdf);
        if (dir) {
            write_file(*dir / "ecdf.csv", csv.str());
        } else {
            out << csv.str();
        }
        return kExitOk;
    });
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Limit-order-book toolkit: replay, simulation and market-order event studies",
                 "lobkit"};
    app.require_subcommand(1);
    KvConfig flags;
    std::string config_path;

    auto value = [&flags](CLI::App* sub, const std::string& flag, const std::string& key,
                          const std::string& help) {
        sub->add_option_function<std::string>(
            flag, [&flags, key](const std::string& v) { flags.set(key, v); }, help)
            ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    };
    auto list = [&flags](CLI::App* sub, const std::string& flag, const std::string& key,
                         const std::string& help) {
        sub->add_option_function<std::vector<std::string>>(
            flag,
            [&flags, key](const std::vector<std::string>& vs) {
                std::string joined;
                for (const auto& v : vs) joined += (joined.empty() ? "" : ",") + v;
                flags.set(key, joined);
            },
            help);
    };
    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key = value file; flags override it");
    };
    auto session = [&](CLI::App* sub) {
        value(sub, "--session-open", "session_open", "market open, seconds after midnight");
        value(sub, "--session-close", "session_close", "market close, seconds after midnight");
        value(sub, "--session-trim", "session_trim", "seconds dropped after open and before close");
        value(sub, "--tick", "tick", "tick size in price units (1e-4 dollars)");
    };

    CLI::App* validate = app.add_subcommand("validate", "replay messages and compare with snapshots");
    common(validate);
    value(validate, "--messages", "messages", "message file");
    value(validate, "--snapshots", "snapshots", "order-book snapshot file");
    value(validate, "--levels", "levels", "levels per snapshot row");
    value(validate, "--tick", "tick", "tick size in price units");
    value(validate, "--max-report", "max_report", "mismatches listed in full");

    CLI::App* scan = app.add_subcommand("scan", "summary statistics of the event mix and book");
    common(scan);
    list(scan, "--messages", "messages", "message files, one per day");
    session(scan);
    value(scan, "--out-dir", "out_dir", "also write scan.csv and config.txt here");

    CLI::App* study = app.add_subcommand("study", "mean net order flow around market orders");
    common(study);
    list(study, "--messages", "messages", "message files, one per day");
    value(study, "--stock", "stock", "label written to the metadata");
    value(study, "--T", "T", "minimum separation between market orders, seconds");
    value(study, "--tau-min", "tau_min", "smallest lag, seconds");
    value(study, "--tau-max", "tau_max", "largest lag, seconds");
    value(study, "--per-decade", "per_decade", "lags per decade");
    value(study, "--mode", "mode", "strict or relaxed");
    value(study, "--bins", "bins", "market-order size bins (0 disables)");
    value(study, "--bootstrap-B", "bootstrap_B", "bootstrap resamples per lag (0 skips)");
    value(study, "--seed", "seed", "base seed");
    value(study, "--normalize", "normalize", "divide by the mean best-queue volume (true/false)");
    session(study);
    value(study, "--out-dir", "out_dir", "output directory");

    CLI::App* simulate = app.add_subcommand("simulate", "zero-intelligence order flow for one day");
    common(simulate);
    value(simulate, "--seed", "seed", "random seed");
    value(simulate, "--horizon", "horizon", "simulated seconds");
    value(simulate, "--limit-rate", "limit_rate", "limit arrivals per second per price level");
    value(simulate, "--market-rate", "market_rate", "market orders per second per side");
    value(simulate, "--cancel-rate", "cancel_rate", "cancellation rate per resting order");
    value(simulate, "--band-levels", "band_levels", "price levels limit orders may land on");
    value(simulate, "--order-sizes", "order_sizes", "uniform:min:max:step or weighted:s@w;...");
    value(simulate, "--latency-floor-ns", "latency_floor_ns", "minimum gap between events");
    value(simulate, "--levels", "snapshot_levels", "levels per snapshot row");
    value(simulate, "--start-time", "start_time", "first timestamp, seconds after midnight");
    value(simulate, "--out-dir", "out_dir", "output directory");
    simulate->add_option_function<std::vector<std::string>>(
        "--set",
        [&flags](const std::vector<std::string>& kvs) {
            for (const auto& kv : kvs) {
                const auto eq = kv.find('=');
                if (eq == std::string::npos || eq == 0) {
                    throw CLI::ValidationError("--set", "expected key=value, got '" + kv + "'");
                }
                flags.set(kv.substr(0, eq), kv.substr(eq + 1));
            }
        },
        "any simulator key as key=value");

    CLI::App* ecdf = app.add_subcommand("ecdf", "market-order inter-arrival distribution");
    common(ecdf);
    list(ecdf, "--messages", "messages", "message files, one per day");
    ecdf->add_flag_callback("--shifted", [&flags] { flags.set("shifted", "true"); },
                            "subtract the minimum inter-arrival time");
    session(ecdf);
    value(ecdf, "--out-dir", "out_dir", "write ecdf.csv here instead of stdout");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    KvConfig effective;
    if (!config_path.empty()) {
        try {
            effective = KvConfig::load(config_path);
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return kExitUsage;
        }
    }
    effective.merge(flags);
    try {
        apply_thread_limit();
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    if (validate->parsed()) return cmd_validate(effective, out, err);
    if (scan->parsed()) return cmd_scan(effective, out, err);
    if (study->parsed()) return cmd_study(effective, out, err);
    if (simulate->parsed()) return cmd_simulate(effective, out, err);
    return cmd_ecdf(effective, out, err);
}

}  // namespace lobkit::cli
