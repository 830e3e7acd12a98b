#include "lobkit/messages.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

namespace lobkit {

namespace {

constexpr std::int64_t kNanosPerSecond = 1'000'000'000;

template <class Int>
bool parse_int(std::string_view field, Int& out) {
    if (field.empty()) return false;
    const char* first = field.data();
    const char* last = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last;
}

void append_int(std::string& out, std::int64_t v) {
    std::array<char, 24> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), ptr);
}

/// Splits on commas into exactly `n` fields; false on any other count.
template <std::size_t N>
bool split_fields(std::string_view line, std::array<std::string_view, N>& fields) {
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (count == N) return false;
        if (comma == std::string_view::npos) {
            fields[count++] = line.substr(start);
            break;
        }
        fields[count++] = line.substr(start, comma - start);
        start = comma + 1;
    }
    return count == N;
}

std::string_view strip_cr(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
}

}  // namespace

Timestamp parse_time(std::string_view text) {
    const std::size_t dot = text.find('.');
    const std::string_view whole = text.substr(0, dot);
    std::int64_t seconds = 0;
    if (!parse_int(whole, seconds) || seconds < 0 || whole.front() == '+') {
        throw std::invalid_argument("bad time '" + std::string(text) + "'");
    }
    std::int64_t frac = 0;
    if (dot != std::string_view::npos) {
        const std::string_view digits = text.substr(dot + 1);
        if (digits.empty() || digits.size() > 9) {
            throw std::invalid_argument("time '" + std::string(text) +
                                        "' needs 1 to 9 fractional digits");
        }
        for (char c : digits) {
            if (c < '0' || c > '9') {
                throw std::invalid_argument("bad time '" + std::string(text) + "'");
            }
            frac = frac * 10 + (c - '0');
        }
        for (std::size_t i = digits.size(); i < 9; ++i) frac *= 10;
    }
    return Timestamp{seconds * kNanosPerSecond + frac};
}

void append_time(std::string& out, Timestamp t) {
    append_int(out, t.ns / kNanosPerSecond);
    out.push_back('.');
    std::int64_t frac = t.ns % kNanosPerSecond;
    std::array<char, 9> digits{};
    for (int i = 8; i >= 0; --i) {
        digits[static_cast<std::size_t>(i)] = static_cast<char>('0' + frac % 10);
        frac /= 10;
    }
    out.append(digits.data(), digits.size());
}

std::string format_time(Timestamp t) {
    std::string out;
    append_time(out, t);
    return out;
}

RawMessage parse_message_line(std::string_view line, std::size_t line_no) {
    std::array<std::string_view, 6> f;
    if (!split_fields(line, f)) {
        throw ParseError(line_no, "expected 6 comma-separated fields");
    }
    RawMessage msg;
    try {
        msg.time = parse_time(f[0]);
    } catch (const std::invalid_argument& e) {
        throw ParseError(line_no, e.what());
    }
    int type = 0;
    if (!parse_int(f[1], type)) throw ParseError(line_no, "bad message type '" + std::string(f[1]) + "'");
    switch (type) {
        case 1: case 2: case 3: case 4: case 5: case 7:
            msg.type = static_cast<MessageType>(type);
            break;
        default:
            throw ParseError(line_no, "unknown message type " + std::to_string(type) +
                                          " (expected 1, 2, 3, 4, 5 or 7)");
    }
    if (!parse_int(f[2], msg.order_id)) throw ParseError(line_no, "bad order id '" + std::string(f[2]) + "'");
    if (!parse_int(f[3], msg.shares)) throw ParseError(line_no, "bad size '" + std::string(f[3]) + "'");
    if (!parse_int(f[4], msg.price.value)) throw ParseError(line_no, "bad price '" + std::string(f[4]) + "'");
    if (!parse_int(f[5], msg.direction) || (msg.direction != 1 && msg.direction != -1)) {
        throw ParseError(line_no, "bad direction '" + std::string(f[5]) + "'");
    }
    if (msg.type != MessageType::Halt && msg.shares <= 0) {
        throw ParseError(line_no, "non-positive size " + std::to_string(msg.shares));
    }
    return msg;
}

void append_message(std::string& out, const RawMessage& msg) {
    append_time(out, msg.time);
    out.push_back(',');
    append_int(out, static_cast<int>(msg.type));
    out.push_back(',');
    append_int(out, static_cast<std::int64_t>(msg.order_id));
    out.push_back(',');
    append_int(out, msg.shares);
    out.push_back(',');
    append_int(out, msg.price.value);
    out.push_back(',');
    append_int(out, msg.direction);
    out.push_back('\n');
}

bool MessageReader::next(RawMessage& out) {
    while (std::getline(in_, buffer_)) {
        ++line_;
        const std::string_view line = strip_cr(buffer_);
        if (line.empty()) continue;
        out = parse_message_line(line, line_);
        if (have_last_ && out.time < last_) {
            throw ParseError(line_, "time regression: " + format_time(out.time) + " after " +
                                        format_time(last_));
        }
        last_ = out.time;
        have_last_ = true;
        return true;
    }
    return false;
}

std::vector<RawMessage> parse_messages(std::istream& in) {
    std::vector<RawMessage> out;
    MessageReader reader(in);
    RawMessage msg;
    while (reader.next(msg)) out.push_back(msg);
    return out;
}

std::vector<RawMessage> parse_messages(std::string_view text) {
    std::istringstream in{std::string(text)};
    return parse_messages(in);
}

std::string serialize_messages(std::span<const RawMessage> messages) {
    std::string out;
    out.reserve(messages.size() * 40);
    for (const RawMessage& m : messages) append_message(out, m);
    return out;
}

void write_messages(std::ostream& out, std::span<const RawMessage> messages) {
    std::string chunk;
    constexpr std::size_t kFlush = 1 << 20;
    for (const RawMessage& m : messages) {
        append_message(chunk, m);
        if (chunk.size() > kFlush) {
            out.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
            chunk.clear();
        }
    }
    out.write(chunk.data(), static_cast<std::streamsize>(chunk.size()));
}

void snapshot_row(const Book& book, std::size_t levels, std::span<std::int64_t> out) {
    const std::size_t asks = book.visit_levels(Side::Sell, levels, [&, i = std::size_t{0}](
                                                                     Price p, Shares v) mutable {
        out[4 * i] = p.value;
        out[4 * i + 1] = v;
        ++i;
    });
    const std::size_t bids = book.visit_levels(Side::Buy, levels, [&, i = std::size_t{0}](
                                                                    Price p, Shares v) mutable {
        out[4 * i + 2] = p.value;
        out[4 * i + 3] = v;
        ++i;
    });
    for (std::size_t i = asks; i < levels; ++i) {
        out[4 * i] = kEmptyAskPrice;
        out[4 * i + 1] = 0;
    }
    for (std::size_t i = bids; i < levels; ++i) {
        out[4 * i + 2] = kEmptyBidPrice;
        out[4 * i + 3] = 0;
    }
}

void SnapshotTable::append(std::span<const std::int64_t> row) {
    if (row.size() != width()) {
        throw std::invalid_argument("snapshot row has " + std::to_string(row.size()) +
                                    " cells, expected " + std::to_string(width()));
    }
    cells_.insert(cells_.end(), row.begin(), row.end());
    ++rows_;
}

void SnapshotTable::append(const Book& book) {
    const std::size_t start = cells_.size();
    cells_.resize(start + width());
    snapshot_row(book, levels_, std::span<std::int64_t>(cells_.data() + start, width()));
    ++rows_;
}

void append_snapshot_row(std::string& out, std::span<const std::int64_t> row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i > 0) out.push_back(',');
        append_int(out, row[i]);
    }
    out.push_back('\n');
}

bool SnapshotReader::next(std::vector<std::int64_t>& row) {
    while (std::getline(in_, buffer_)) {
        ++line_;
        const std::string_view line = strip_cr(buffer_);
        if (line.empty() && levels_ > 0) continue;
        row.clear();
        std::size_t start = 0;
        while (levels_ > 0) {
            const std::size_t comma = line.find(',', start);
            const std::string_view field =
                line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                   : comma - start);
            std::int64_t v = 0;
            if (!parse_int(field, v)) {
                throw ParseError(line_, "bad snapshot cell '" + std::string(field) + "'");
            }
            row.push_back(v);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (row.size() != 4 * levels_) {
            throw ParseError(line_, "snapshot row has " + std::to_string(row.size()) +
                                        " cells, expected " + std::to_string(4 * levels_));
        }
        for (std::size_t i = 0; i < levels_; ++i) {
            if (row[4 * i + 1] < 0 || row[4 * i + 3] < 0) {
                throw ParseError(line_, "negative level size");
            }
        }
        return true;
    }
    return false;
}

SnapshotTable parse_snapshots(std::istream& in, std::size_t levels) {
    SnapshotTable table(levels);
    SnapshotReader reader(in, levels);
    std::vector<std::int64_t> row;
    while (reader.next(row)) table.append(row);
    return table;
}

std::string serialize_snapshots(const SnapshotTable& table) {
    std::string out;
    for (std::size_t i = 0; i < table.rows(); ++i) append_snapshot_row(out, table.row(i));
    return out;
}

}  // namespace lobkit
