#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lobkit/book.hpp"
#include "lobkit/messages.hpp"

namespace lobkit {

/// A single applied message bracketed by the quotes around it.
struct ReplayStep {
    std::size_t message_index{0};
    QuoteSnapshot before;
    BookEvent event;
    QuoteSnapshot after;
};

/// Applies message-file rows to a book one at a time.
///
/// ExecuteHidden rows leave the visible book untouched and Halt rows are
/// recorded; neither produces a step.
class Replayer {
public:
    explicit Replayer(Book& book) : book_(book), quotes_(book.quotes()) {}

    std::optional<ReplayStep> apply(const RawMessage& msg);

    const std::vector<Timestamp>& halts() const { return halts_; }
    std::size_t applied() const { return index_; }
    const Book& book() const { return book_; }

private:
    Book& book_;
    QuoteSnapshot quotes_;
    std::vector<Timestamp> halts_;
    std::size_t index_{0};
};

struct ReplayLog {
    std::vector<ReplayStep> steps;
    std::vector<Timestamp> halts;
};

ReplayLog replay(std::span<const RawMessage> messages, Book& book);

struct SnapshotMismatch {
    std::size_t message_index{0};
    std::size_t cell{0};
    std::int64_t expected{0};
    std::int64_t actual{0};
};

struct ValidationReport {
    std::size_t messages{0};
    std::size_t mismatched_rows{0};
    std::vector<SnapshotMismatch> first;  ///< up to the configured limit

    bool ok() const { return mismatched_rows == 0; }
    std::string describe() const;
};

/// Replays `messages` from an empty book and compares the top `levels` of
/// the reconstruction with each snapshot row. Throws std::invalid_argument
/// if the streams differ in length.
ValidationReport validate_snapshots(std::span<const RawMessage> messages,
                                    const SnapshotTable& snapshots, std::size_t levels,
                                    std::size_t max_reported = 10, Price tick = kDefaultTick);

/// Streaming form over two readers; the same checks as above.
ValidationReport validate_snapshots(MessageReader& messages, SnapshotReader& snapshots,
                                    std::size_t levels, std::size_t max_reported = 10,
                                    Price tick = kDefaultTick);

/// Continuous-trading window with the opening and closing stretches trimmed.
/// An event at time t is inside iff window_start() <= t < window_end().
struct DaySession {
    std::string date;
    Timestamp open = Timestamp::from_seconds(9 * 3600 + 30 * 60);
    Timestamp close = Timestamp::from_seconds(16 * 3600);
    std::int64_t trim_ns = 1000LL * 1'000'000'000;

    Timestamp window_start() const { return open + trim_ns; }
    Timestamp window_end() const { return close - trim_ns; }
    bool contains(Timestamp t) const { return t >= window_start() && t < window_end(); }
    std::int64_t window_length() const { return window_end() - window_start(); }
};

template <class T, class TimeOf>
std::vector<T> session_filter(std::span<const T> events, const DaySession& session,
                              TimeOf time_of) {
    std::vector<T> out;
    for (const T& e : events) {
        if (session.contains(time_of(e))) out.push_back(e);
    }
    return out;
}

inline std::vector<RawMessage> session_filter(std::span<const RawMessage> messages,
                                              const DaySession& session) {
    return session_filter(messages, session, [](const RawMessage& m) { return m.time; });
}

}  // namespace lobkit
