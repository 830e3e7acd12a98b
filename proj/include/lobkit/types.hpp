#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace lobkit {

/// Prices are integers in 1e-4 currency units; a $0.01 tick is 100.
struct Price {
    std::int64_t value{0};

    constexpr Price() = default;
    constexpr explicit Price(std::int64_t v) : value(v) {}

    constexpr auto operator<=>(const Price&) const = default;

    constexpr Price operator+(Price rhs) const { return Price{value + rhs.value}; }
    constexpr Price operator-(Price rhs) const { return Price{value - rhs.value}; }
    constexpr Price operator*(std::int64_t k) const { return Price{value * k}; }

    double dollars() const { return static_cast<double>(value) / 1e4; }
};

inline constexpr Price kDefaultTick{100};

/// Nanoseconds since midnight of the trading day.
struct Timestamp {
    std::int64_t ns{0};

    constexpr Timestamp() = default;
    constexpr explicit Timestamp(std::int64_t v) : ns(v) {}

    constexpr auto operator<=>(const Timestamp&) const = default;

    constexpr Timestamp operator+(std::int64_t delta_ns) const { return Timestamp{ns + delta_ns}; }
    constexpr Timestamp operator-(std::int64_t delta_ns) const { return Timestamp{ns - delta_ns}; }
    constexpr std::int64_t operator-(Timestamp rhs) const { return ns - rhs.ns; }

    double seconds() const { return static_cast<double>(ns) / 1e9; }

    static constexpr Timestamp from_seconds(std::int64_t s) { return Timestamp{s * 1'000'000'000}; }
};

using OrderId = std::uint64_t;
using Shares = std::int64_t;

enum class Side : std::uint8_t { Buy, Sell };

constexpr Side opposite(Side s) { return s == Side::Buy ? Side::Sell : Side::Buy; }

/// +1 for buy, -1 for sell (the message-file direction convention).
constexpr int direction_sign(Side s) { return s == Side::Buy ? 1 : -1; }

inline Side side_from_sign(int sign) {
    if (sign == 1) return Side::Buy;
    if (sign == -1) return Side::Sell;
    throw std::invalid_argument("direction must be +1 or -1, got " + std::to_string(sign));
}

inline const char* to_string(Side s) { return s == Side::Buy ? "buy" : "sell"; }

/// Raised when an operation would violate book consistency (unknown id,
/// over-cancel, crossed insert, misaligned price).
class BookError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace lobkit
