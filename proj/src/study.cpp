#include "lobkit/study.hpp"

#include <cmath>

#include "lobkit/messages.hpp"

namespace lobkit {

std::int64_t StudyConfig::separation_ns() const { return std::llround(separation_s * 1e9); }

DaySession StudyConfig::session(const std::string& date) const {
    DaySession s;
    s.date = date;
    s.open = session_open;
    s.close = session_close;
    s.trim_ns = std::llround(session_trim_s * 1e9);
    return s;
}

void StudyConfig::validate() const {
    if (!(separation_s >= 0.0) || !std::isfinite(separation_s)) {
        throw ConfigError("T must be a non-negative number of seconds");
    }
    if (!(tau_min_s > 0.0) || !(tau_max_s >= tau_min_s) || !std::isfinite(tau_max_s)) {
        throw ConfigError("need 0 < tau_min <= tau_max");
    }
    if (per_decade < 1) throw ConfigError("per_decade must be positive");
    if (bins == 1) throw ConfigError("bins must be 0 (off) or at least 2");
    if (!(session_trim_s >= 0.0)) throw ConfigError("session_trim must be non-negative");
    if (session(std::string{}).window_length() <= 0) {
        throw ConfigError("session window is empty after trimming");
    }
    if (tick.value <= 0) throw ConfigError("tick must be positive");
    try {
        (void)grid();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
}

const std::set<std::string>& StudyConfig::keys() {
    static const std::set<std::string> k{
        "stock",        "T",           "tau_min",       "tau_max",       "per_decade",
        "mode",         "bins",        "bootstrap_B",   "seed",          "normalize",
        "session_open", "session_close", "session_trim", "tick",
    };
    return k;
}

StudyConfig StudyConfig::from_config(const KvConfig& cfg) {
    const auto unknown = cfg.unknown_keys(keys());
    if (!unknown.empty()) {
        std::string names;
        for (const auto& k : unknown) names += (names.empty() ? "" : ", ") + k;
        throw ConfigError("unknown study config keys: " + names);
    }
    StudyConfig s;
    s.stock = cfg.get_string("stock", s.stock);
    s.separation_s = cfg.get_double("T", s.separation_s);
    s.tau_min_s = cfg.get_double("tau_min", s.tau_min_s);
    s.tau_max_s = cfg.get_double("tau_max", s.tau_max_s);
    s.per_decade = static_cast<int>(cfg.get_int("per_decade", s.per_decade));
    if (const auto m = cfg.get("mode")) {
        try {
            s.mode = parse_mode(*m);
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    s.bins = static_cast<std::size_t>(cfg.get_uint("bins", s.bins));
    s.bootstrap_B = static_cast<std::size_t>(cfg.get_uint("bootstrap_B", s.bootstrap_B));
    s.seed = cfg.get_uint("seed", s.seed);
    s.normalize = cfg.get_bool("normalize", s.normalize);
    for (auto [key, field] : {std::pair{"session_open", &s.session_open},
                              std::pair{"session_close", &s.session_close}}) {
        if (const auto v = cfg.get(key)) {
            try {
                *field = parse_time(*v);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(std::string(key) + ": " + e.what());
            }
        }
    }
    s.session_trim_s = cfg.get_double("session_trim", s.session_trim_s);
    s.tick = Price{cfg.get_int("tick", s.tick.value)};
    s.validate();
    return s;
}

KvConfig StudyConfig::to_config() const {
    KvConfig c;
    c.set("stock", stock);
    c.set("T", format_double(separation_s));
    c.set("tau_min", format_double(tau_min_s));
    c.set("tau_max", format_double(tau_max_s));
    c.set("per_decade", std::to_string(per_decade));
    c.set("mode", to_string(mode));
    c.set("bins", std::to_string(bins));
    c.set("bootstrap_B", std::to_string(bootstrap_B));
    c.set("seed", std::to_string(seed));
    c.set("normalize", normalize ? "true" : "false");
    c.set("session_open", format_time(session_open));
    c.set("session_close", format_time(session_close));
    c.set("session_trim", format_double(session_trim_s));
    c.set("tick", std::to_string(tick.value));
    return c;
}

StudyAccumulator::StudyAccumulator(StudyConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    grid_ = cfg_.grid();
}

void StudyAccumulator::add_day(const FlowTape& tape, const std::string& date) {
    const DaySession session = cfg_.session(date);
    const auto events = detect_market_orders(tape);
    for (Horizon h : {Horizon::After, Horizon::Before}) {
        HorizonData& d = h == Horizon::After ? after_ : before_;
        const EventSet set =
            select_event_set(events, cfg_.separation_ns(), cfg_.maintaining_only(), h, session);
        d.batch.append(compute_trajectories(tape, set, grid_, cfg_.mode, session));
        for (const auto& e : set.events) d.sizes.push_back(e.total_shares);
    }
    volume_.merge(integrate_best_volume(tape, session.window_start(), session.window_end()));
    ++days_;
}

namespace {

std::uint64_t combo_index(Horizon h, CurveSide s) {
    return (h == Horizon::After ? 0u : 2u) + (s == CurveSide::Same ? 0u : 1u);
}

std::string curve_name(Horizon h, CurveSide s) { return to_string(s) + "_" + to_string(h); }

}  // namespace

StudyResult StudyAccumulator::finish() const {
    StudyResult r;
    r.days = days_;
    r.events_after = after_.sizes.size();
    r.events_before = before_.sizes.size();
    if (r.events_after == 0 || r.events_before == 0) {
        throw StudyError("no market orders satisfy the selection (after: " +
                         std::to_string(r.events_after) +
                         ", before: " + std::to_string(r.events_before) + ")");
    }
    if (volume_.duration_ns > 0) r.basis = volume_.mean();
    if (cfg_.normalize && (!r.basis || *r.basis <= 0.0)) {
        throw StudyError("normalization basis is zero: no quoted volume inside the session window");
    }

    auto finish_curve = [&](const std::vector<Trajectory>& ts, Horizon h, CurveSide s,
                            std::uint64_t curve_id) {
        AggregateCurve c = aggregate(ts, grid_, s, h, {cfg_.bootstrap_B, cfg_.seed, curve_id});
        return cfg_.normalize ? normalize(c, *r.basis) : c;
    };

    for (Horizon h : {Horizon::After, Horizon::Before}) {
        const HorizonData& d = h == Horizon::After ? after_ : before_;
        for (CurveSide s : {CurveSide::Same, CurveSide::Opposite}) {
            r.curves.push_back(
                {curve_name(h, s), finish_curve(d.batch.of(s), h, s, combo_index(h, s)), {}});
        }
    }

    if (cfg_.bins == 0) return r;
    for (Horizon h : {Horizon::After, Horizon::Before}) {
        const HorizonData& d = h == Horizon::After ? after_ : before_;
        SizePartition part;
        try {
            part = partition_by_size(d.sizes, cfg_.bins);
        } catch (const std::invalid_argument& e) {
            throw StudyError(std::string("size partition: ") + e.what());
        }
        r.degenerate_bins = r.degenerate_bins || part.degenerate;
        (h == Horizon::After ? r.thresholds_after : r.thresholds_before) = part.thresholds;
        for (std::size_t b = 0; b < part.bins.size(); ++b) {
            for (CurveSide s : {CurveSide::Same, CurveSide::Opposite}) {
                std::vector<Trajectory> members;
                members.reserve(part.bins[b].size());
                for (std::size_t i : part.bins[b]) members.push_back(d.batch.of(s)[i]);
                const std::uint64_t id = 4 + b * 4 + combo_index(h, s);
                r.curves.push_back({curve_name(h, s) + "_bin" + std::to_string(b + 1),
                                    finish_curve(members, h, s, id), b + 1});
            }
        }
    }
    return r;
}

}  // namespace lobkit
