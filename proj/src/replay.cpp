#include "lobkit/replay.hpp"

#include <sstream>

namespace lobkit {

std::optional<ReplayStep> Replayer::apply(const RawMessage& msg) {
    const std::size_t index = index_++;
    BookEvent event;
    try {
        switch (msg.type) {
            case MessageType::NewLimit:
                event = book_.add(msg.order_id, msg.side(), msg.price, msg.shares, msg.time);
                break;
            case MessageType::PartialCancel:
                event = book_.cancel(msg.order_id, msg.shares, msg.time);
                break;
            case MessageType::Delete:
                event = book_.cancel(msg.order_id, std::nullopt, msg.time);
                break;
            case MessageType::ExecuteVisible: {
                const RestingOrder* resting = book_.find(msg.order_id);
                if (resting != nullptr &&
                    (resting->price != msg.price || resting->side != msg.side())) {
                    throw BookError("execution of order " + std::to_string(msg.order_id) +
                                    " disagrees with its resting price or side");
                }
                event = book_.execute(msg.order_id, msg.shares, msg.time);
                break;
            }
            case MessageType::ExecuteHidden:
                return std::nullopt;
            case MessageType::Halt:
                halts_.push_back(msg.time);
                return std::nullopt;
        }
    } catch (const BookError& e) {
        throw BookError("message " + std::to_string(index + 1) + ": " + e.what());
    }
    ReplayStep step{index, quotes_, event, book_.quotes()};
    quotes_ = step.after;
    return step;
}

ReplayLog replay(std::span<const RawMessage> messages, Book& book) {
    ReplayLog log;
    log.steps.reserve(messages.size());
    Replayer replayer(book);
    for (const RawMessage& msg : messages) {
        if (auto step = replayer.apply(msg)) log.steps.push_back(*step);
    }
    log.halts = replayer.halts();
    return log;
}

std::string ValidationReport::describe() const {
    std::ostringstream out;
    out << messages << " messages, " << mismatched_rows << " mismatched snapshot rows\n";
    for (const SnapshotMismatch& m : first) {
        out << "  message " << (m.message_index + 1) << " cell " << (m.cell + 1) << ": expected "
            << m.expected << ", reconstructed " << m.actual << '\n';
    }
    return out.str();
}

namespace {

class RowChecker {
public:
    RowChecker(std::size_t levels, std::size_t max_reported, Price tick)
        : book_(tick), replayer_(book_), levels_(levels), max_reported_(max_reported),
          actual_(4 * levels) {}

    void check(const RawMessage& msg, std::span<const std::int64_t> expected) {
        const std::size_t index = replayer_.applied();
        replayer_.apply(msg);
        snapshot_row(book_, levels_, actual_);
        bool row_bad = false;
        for (std::size_t c = 0; c < actual_.size(); ++c) {
            if (expected[c] == actual_[c]) continue;
            if (!row_bad && report_.first.size() < max_reported_) {
                report_.first.push_back(SnapshotMismatch{index, c, expected[c], actual_[c]});
            }
            row_bad = true;
        }
        if (row_bad) ++report_.mismatched_rows;
        ++report_.messages;
    }

    ValidationReport finish() { return std::move(report_); }

private:
    Book book_;
    Replayer replayer_;
    std::size_t levels_;
    std::size_t max_reported_;
    std::vector<std::int64_t> actual_;
    ValidationReport report_;
};

}  // namespace

ValidationReport validate_snapshots(std::span<const RawMessage> messages,
                                    const SnapshotTable& snapshots, std::size_t levels,
                                    std::size_t max_reported, Price tick) {
    if (messages.size() != snapshots.rows()) {
        throw std::invalid_argument("message stream has " + std::to_string(messages.size()) +
                                    " rows but snapshot stream has " +
                                    std::to_string(snapshots.rows()));
    }
    if (snapshots.levels() != levels) {
        throw std::invalid_argument("snapshot table has " + std::to_string(snapshots.levels()) +
                                    " levels, expected " + std::to_string(levels));
    }
    RowChecker checker(levels, max_reported, tick);
    for (std::size_t i = 0; i < messages.size(); ++i) checker.check(messages[i], snapshots.row(i));
    return checker.finish();
}

ValidationReport validate_snapshots(MessageReader& messages, SnapshotReader& snapshots,
                                    std::size_t levels, std::size_t max_reported, Price tick) {
    RowChecker checker(levels, max_reported, tick);
    RawMessage msg;
    std::vector<std::int64_t> row;
    std::size_t count = 0;
    while (true) {
        const bool has_msg = messages.next(msg);
        const bool has_row = snapshots.next(row);
        if (has_msg != has_row) {
            throw std::invalid_argument("stream length mismatch after " + std::to_string(count) +
                                        " rows: " +
                                        (has_msg ? "snapshot" : "message") + " stream ended first");
        }
        if (!has_msg) break;
        checker.check(msg, row);
        ++count;
    }
    return checker.finish();
}

}  // namespace lobkit
