#include "lobkit/stats.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "lobkit/rng.hpp"

namespace lobkit {

namespace {

/// Adapts CounterRng to the standard UniformRandomBitGenerator interface.
struct RngBits {
    using result_type = std::uint64_t;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()() { return rng.next(); }
    CounterRng& rng;
};

/// The sample as a multiset split into repeated values and a flat tail.
struct Multiset {
    std::vector<std::pair<double, std::int64_t>> heavy;  ///< most frequent first
    std::vector<double> light;
    std::size_t n{0};
    bool constant{false};
};

constexpr std::int64_t kHeavyCount = 128;

Multiset make_multiset(std::span<const double> sample) {
    if (sample.empty()) throw std::invalid_argument("bootstrap of an empty sample");
    for (double x : sample) {
        if (std::isnan(x)) throw std::invalid_argument("bootstrap sample contains NaN");
    }
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    Multiset m;
    m.n = sorted.size();
    m.constant = sorted.front() == sorted.back();
    for (std::size_t i = 0; i < sorted.size();) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const auto count = static_cast<std::int64_t>(j - i);
        if (count >= kHeavyCount) {
            m.heavy.emplace_back(sorted[i], count);
        } else {
            m.light.insert(m.light.end(), sorted.begin() + static_cast<std::ptrdiff_t>(i),
                           sorted.begin() + static_cast<std::ptrdiff_t>(j));
        }
        i = j;
    }
    std::stable_sort(m.heavy.begin(), m.heavy.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    return m;
}

double resample_mean(const Multiset& m, std::uint64_t key) {
    CounterRng rng(key);
    RngBits bits{rng};
    auto remaining_draws = static_cast<std::int64_t>(m.n);
    auto remaining_mass = static_cast<std::int64_t>(m.n);
    double sum = 0.0;
    for (const auto& [value, count] : m.heavy) {
        if (remaining_draws == 0) break;
        std::int64_t c;
        if (count == remaining_mass) {
            c = remaining_draws;
        } else {
            std::binomial_distribution<std::int64_t> binom(
                remaining_draws, static_cast<double>(count) / static_cast<double>(remaining_mass));
            c = binom(bits);
        }
        sum += static_cast<double>(c) * value;
        remaining_draws -= c;
        remaining_mass -= count;
    }
    for (std::int64_t r = 0; r < remaining_draws; ++r) {
        sum += m.light[rng.below(m.light.size())];
    }
    return sum / static_cast<double>(m.n);
}

double mean_of(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

BootstrapEstimate finish(std::span<const double> sample, const std::vector<double>& means,
                         std::size_t B, std::uint64_t seed, bool constant) {
    BootstrapEstimate est;
    est.B = B;
    est.seed = seed;
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    est.point = mean_of(sorted);
    if (B < 2 || constant) return est;
    const double m = mean_of(means);
    double ss = 0.0;
    for (double x : means) ss += (x - m) * (x - m);
    est.std_error = std::sqrt(ss / static_cast<double>(B - 1));
    return est;
}

void check_b(std::size_t B) {
    if (B == 0) throw std::invalid_argument("bootstrap needs B >= 1");
}

}  // namespace

Ecdf::Ecdf(std::vector<double> samples) : sorted_(std::move(samples)) {
    if (sorted_.empty()) throw std::invalid_argument("ECDF of an empty sample");
    for (double x : sorted_) {
        if (std::isnan(x)) throw std::invalid_argument("ECDF sample contains NaN");
    }
    std::sort(sorted_.begin(), sorted_.end());
}

Ecdf Ecdf::min_shifted(std::vector<double> samples) {
    if (samples.empty()) throw std::invalid_argument("ECDF of an empty sample");
    const double lo = *std::min_element(samples.begin(), samples.end());
    for (double& x : samples) x -= lo;
    return Ecdf(std::move(samples));
}

double Ecdf::operator()(double x) const {
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

std::vector<std::pair<double, double>> Ecdf::steps() const {
    std::vector<std::pair<double, double>> out;
    const double n = static_cast<double>(sorted_.size());
    for (std::size_t i = 0; i < sorted_.size(); ++i) {
        if (i + 1 < sorted_.size() && sorted_[i + 1] == sorted_[i]) continue;
        out.emplace_back(sorted_[i], static_cast<double>(i + 1) / n);
    }
    return out;
}

double dkw_epsilon(std::size_t n, double alpha) {
    if (n == 0 || !(alpha > 0.0 && alpha < 1.0)) {
        throw std::invalid_argument("DKW band needs n > 0 and 0 < alpha < 1");
    }
    return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

BootstrapEstimate bootstrap_stderr_serial(std::span<const double> sample, std::size_t B,
                                          std::uint64_t seed) {
    check_b(B);
    const Multiset m = make_multiset(sample);
    std::vector<double> means(B, 0.0);
    if (!m.constant) {
        for (std::size_t l = 0; l < B; ++l) means[l] = resample_mean(m, derive_key(seed, l));
    }
    return finish(sample, means, B, seed, m.constant);
}

BootstrapEstimate bootstrap_stderr(std::span<const double> sample, std::size_t B,
                                   std::uint64_t seed) {
    check_b(B);
    const Multiset m = make_multiset(sample);
    std::vector<double> means(B, 0.0);
    if (!m.constant) {
        const auto count = static_cast<std::int64_t>(B);
#pragma omp parallel for schedule(static)
        for (std::int64_t l = 0; l < count; ++l) {
            means[static_cast<std::size_t>(l)] =
                resample_mean(m, derive_key(seed, static_cast<std::uint64_t>(l)));
        }
    }
    return finish(sample, means, B, seed, m.constant);
}

std::uint64_t lag_seed(std::uint64_t base, std::uint64_t curve, std::uint64_t lag) {
    return derive_key(derive_key(base, curve), lag);
}

double symlog(double x, double threshold) {
    if (!(threshold > 0.0)) throw std::invalid_argument("symlog threshold must be positive");
    const double a = std::fabs(x);
    if (a <= threshold) return x;
    return std::copysign(threshold * (1.0 + std::log(a / threshold)), x);
}

std::vector<double> symlog(std::span<const double> xs, double threshold) {
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(symlog(x, threshold));
    return out;
}

int apply_thread_limit() {
    const char* env = std::getenv("LOBKIT_THREADS");
    if (env == nullptr || *env == '\0') return 0;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1) {
        throw std::invalid_argument(std::string("LOBKIT_THREADS must be a positive integer, got '") +
                                    env + "'");
    }
    omp_set_num_threads(static_cast<int>(v));
    return static_cast<int>(v);
}

}  // namespace lobkit
