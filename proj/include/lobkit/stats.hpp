#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace lobkit {

/// Empirical distribution function of a finite sample.
class Ecdf {
public:
    /// Throws std::invalid_argument on an empty sample or a NaN value.
    explicit Ecdf(std::vector<double> samples);

    /// The sample shifted so that its minimum sits at zero.
    static Ecdf min_shifted(std::vector<double> samples);

    /// Fraction of samples <= x.
    double operator()(double x) const;

    std::size_t size() const { return sorted_.size(); }
    double min() const { return sorted_.front(); }
    double max() const { return sorted_.back(); }
    const std::vector<double>& sorted() const { return sorted_; }

    /// (x, F(x)) at each distinct sample value, ascending.
    std::vector<std::pair<double, double>> steps() const;

private:
    std::vector<double> sorted_;
};

/// sup |F_n - F| against a continuous reference cdf.
template <class Cdf>
double ks_distance(const Ecdf& ecdf, Cdf&& cdf) {
    const auto& xs = ecdf.sorted();
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double f = cdf(xs[i]);
        const double above = static_cast<double>(i + 1) / n - f;
        const double below = f - static_cast<double>(i) / n;
        if (above > d) d = above;
        if (below > d) d = below;
    }
    return d;
}

/// Half-width of the Dvoretzky-Kiefer-Wolfowitz band at level alpha.
double dkw_epsilon(std::size_t n, double alpha);

struct BootstrapEstimate {
    double point{0.0};      ///< sample mean
    double std_error{0.0};  ///< standard deviation of the B resample means
    std::size_t B{0};
    std::uint64_t seed{0};
};

/// Non-parametric bootstrap of the sample mean.
///
/// Resample l draws from its own counter stream keyed by derive_key(seed, l),
/// so the result does not depend on thread count or scheduling. The sample
/// is treated as a multiset: heavily repeated values are allocated to each
/// resample by sequential binomial draws, the remainder by direct uniform
/// draws. Both routes produce exact with-replacement resamples.
BootstrapEstimate bootstrap_stderr(std::span<const double> sample, std::size_t B,
                                   std::uint64_t seed);

/// Single-threaded reference; bit-identical to bootstrap_stderr.
BootstrapEstimate bootstrap_stderr_serial(std::span<const double> sample, std::size_t B,
                                          std::uint64_t seed);

/// Seed for lag `lag` of curve `curve` under a run's base seed.
std::uint64_t lag_seed(std::uint64_t base, std::uint64_t curve, std::uint64_t lag);

/// Linear inside [-threshold, threshold], signed logarithm outside; continuous
/// and strictly increasing.
double symlog(double x, double threshold = 1e-4);
std::vector<double> symlog(std::span<const double> xs, double threshold = 1e-4);

/// Caps the OpenMP thread count from LOBKIT_THREADS, if set. Returns the cap
/// in effect (0 when unset).
int apply_thread_limit();

}  // namespace lobkit
