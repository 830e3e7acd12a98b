#include "lobkit/curve_io.hpp"

#include <json.hpp>
#include <ostream>

#include "lobkit/config.hpp"

namespace lobkit {

namespace {

double signed_tau(const AggregateCurve& c, std::size_t k) {
    return c.horizon == Horizon::Before ? -c.tau_s[k] : c.tau_s[k];
}

}  // namespace

void write_curve_csv(std::ostream& out, const AggregateCurve& curve) {
    out << "tau,mean,stderr,n\n";
    for (std::size_t k = 0; k < curve.size(); ++k) {
        out << format_double(signed_tau(curve, k)) << ',';
        if (curve.mean[k]) out << format_double(*curve.mean[k]);
        out << ',';
        if (curve.bootstrap_B > 0 && curve.std_error[k]) out << format_double(*curve.std_error[k]);
        out << ',' << curve.totals.n[k] << '\n';
    }
}

std::string curve_json(const StudyCurve& sc, const StudyConfig& cfg, const StudyResult& result) {
    const AggregateCurve& c = sc.curve;
    nlohmann::ordered_json j;
    j["stock"] = cfg.stock;
    j["curve"] = sc.name;
    j["mode"] = to_string(cfg.mode);
    j["side"] = to_string(c.side);
    j["horizon"] = to_string(c.horizon);
    j["T"] = cfg.separation_s;
    j["price_maintaining_only"] = cfg.maintaining_only();
    j["normalized"] = cfg.normalize;
    j["normalization_basis"] = c.basis;
    j["mean_best_volume"] = result.basis ? nlohmann::ordered_json(*result.basis) : nullptr;
    j["bootstrap_B"] = c.bootstrap_B;
    j["seed"] = cfg.seed;
    j["days"] = result.days;
    j["events"] = c.horizon == Horizon::After ? result.events_after : result.events_before;
    if (sc.bin) {
        const auto& th = c.horizon == Horizon::After ? result.thresholds_after : result.thresholds_before;
        j["bin"] = *sc.bin;
        j["bins"] = cfg.bins;
        j["size_thresholds"] = th;
        j["degenerate_bins"] = result.degenerate_bins;
    }
    auto& rows = j["points"] = nlohmann::ordered_json::array();
    for (std::size_t k = 0; k < c.size(); ++k) {
        nlohmann::ordered_json p;
        p["tau"] = signed_tau(c, k);
        p["mean"] = c.mean[k] ? nlohmann::ordered_json(*c.mean[k]) : nullptr;
        p["stderr"] = (c.bootstrap_B > 0 && c.std_error[k]) ? nlohmann::ordered_json(*c.std_error[k])
                                                            : nullptr;
        p["n"] = c.totals.n[k];
        rows.push_back(std::move(p));
    }
    return j.dump(2) + "\n";
}

void write_ecdf_csv(std::ostream& out, const Ecdf& ecdf) {
    out << "x,F,one_minus_F\n";
    for (const auto& [x, f] : ecdf.steps()) {
        out << format_double(x) << ',' << format_double(f) << ',' << format_double(1.0 - f) << '\n';
    }
}

}  // namespace lobkit
