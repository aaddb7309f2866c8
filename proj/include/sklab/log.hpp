#pragma once

#include <string>

namespace sklab {

enum class LogLevel { debug = 0, info = 1, warn = 2, error = 3, off = 4 };

// Threshold from SKLAB_LOG (debug|info|warn|error|off), default warn.
LogLevel log_threshold();
void set_log_threshold(LogLevel level);
void log_message(LogLevel level, const std::string& msg);

}  // namespace sklab
