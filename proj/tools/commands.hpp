#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "lobkit/config.hpp"

namespace lobkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAnalytical = 1;  ///< mismatch, empty event set
inline constexpr int kExitUsage = 2;       ///< bad flags, bad config, I/O

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Each command takes its effective run configuration (config file overlaid
/// with flags) and returns an exit code. Errors that map to an exit code are
/// reported on `err`.
int cmd_validate(const KvConfig& run, std::ostream& out, std::ostream& err);
int cmd_scan(const KvConfig& run, std::ostream& out, std::ostream& err);
int cmd_study(const KvConfig& run, std::ostream& out, std::ostream& err);
int cmd_simulate(const KvConfig& run, std::ostream& out, std::ostream& err);
int cmd_ecdf(const KvConfig& run, std::ostream& out, std::ostream& err);

/// Parses `args` (without the program name) and dispatches.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Date label taken from a LOBSTER-style file name, or empty.
std::string date_from_path(const std::string& path);

}  // namespace lobkit::cli
