#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "lobkit/book.hpp"
#include "lobkit/types.hpp"

namespace lobkit {

enum class MessageType : std::uint8_t {
    NewLimit = 1,
    PartialCancel = 2,
    Delete = 3,
    ExecuteVisible = 4,
    ExecuteHidden = 5,
    Halt = 7,
};

/// One row of a message file: time, type, order id, size, price, direction.
/// For executions the direction is the resting order's side.
struct RawMessage {
    Timestamp time;
    MessageType type{MessageType::NewLimit};
    OrderId order_id{0};
    Shares shares{0};
    Price price;
    int direction{1};

    bool operator==(const RawMessage&) const = default;

    Side side() const { return direction > 0 ? Side::Buy : Side::Sell; }
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Decimal seconds after midnight with up to 9 fractional digits; shorter
/// fractions are right-padded with zeros.
Timestamp parse_time(std::string_view text);

/// Canonical form: integer seconds, '.', exactly 9 fractional digits.
std::string format_time(Timestamp t);
void append_time(std::string& out, Timestamp t);

RawMessage parse_message_line(std::string_view line, std::size_t line_no);
void append_message(std::string& out, const RawMessage& msg);

/// Streaming reader over a message file; holds one line at a time and
/// rejects time regressions.
class MessageReader {
public:
    explicit MessageReader(std::istream& in) : in_(in) {}

    /// Returns false at end of input.
    bool next(RawMessage& out);
    std::size_t line() const { return line_; }

private:
    std::istream& in_;
    std::string buffer_;
    std::size_t line_{0};
    Timestamp last_;
    bool have_last_{false};
};

std::vector<RawMessage> parse_messages(std::istream& in);
std::vector<RawMessage> parse_messages(std::string_view text);
std::string serialize_messages(std::span<const RawMessage> messages);
void write_messages(std::ostream& out, std::span<const RawMessage> messages);

/// Placeholder prices for missing levels in snapshot rows.
inline constexpr std::int64_t kEmptyAskPrice = 9'999'999'999;
inline constexpr std::int64_t kEmptyBidPrice = -9'999'999'999;

/// Dense row-major table of snapshot rows. Each row has 4k cells:
/// ask price, ask size, bid price, bid size, repeated for levels 1..k.
class SnapshotTable {
public:
    explicit SnapshotTable(std::size_t levels = 0) : levels_(levels) {}

    std::size_t levels() const { return levels_; }
    std::size_t width() const { return 4 * levels_; }
    std::size_t rows() const { return rows_; }

    std::span<const std::int64_t> row(std::size_t i) const {
        return {cells_.data() + i * width(), width()};
    }
    void append(std::span<const std::int64_t> row);
    void append(const Book& book);

    bool operator==(const SnapshotTable&) const = default;

private:
    std::size_t levels_;
    std::size_t rows_{0};
    std::vector<std::int64_t> cells_;
};

/// Fills `out` (size 4k) with the top-k levels of `book`.
void snapshot_row(const Book& book, std::size_t levels, std::span<std::int64_t> out);

void append_snapshot_row(std::string& out, std::span<const std::int64_t> row);

class SnapshotReader {
public:
    SnapshotReader(std::istream& in, std::size_t levels) : in_(in), levels_(levels) {}

    bool next(std::vector<std::int64_t>& row);
    std::size_t line() const { return line_; }

private:
    std::istream& in_;
    std::size_t levels_;
    std::string buffer_;
    std::size_t line_{0};
};

SnapshotTable parse_snapshots(std::istream& in, std::size_t levels);
std::string serialize_snapshots(const SnapshotTable& table);

}  // namespace lobkit
