#pragma once

#include <string>

namespace eden {

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3, quiet = 4 };

/// Threshold comes from the EDEN_SIM_LOG environment variable
/// (debug|info|warn|error|quiet); default warn.
LogLevel log_threshold();

void log_message(LogLevel level, const std::string& msg);

inline void log_debug(const std::string& m) { log_message(LogLevel::debug, m); }
inline void log_info(const std::string& m) { log_message(LogLevel::info, m); }
inline void log_warn(const std::string& m) { log_message(LogLevel::warn, m); }
inline void log_error(const std::string& m) { log_message(LogLevel::error, m); }

}  // namespace eden
