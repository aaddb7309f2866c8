#include "sklab/log.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <iostream>
#include <mutex>

namespace sklab {

namespace {

LogLevel from_env() {
    const char* env = std::getenv("SKLAB_LOG");
    if (!env) return LogLevel::warn;
    if (!std::strcmp(env, "debug")) return LogLevel::debug;
    if (!std::strcmp(env, "info")) return LogLevel::info;
    if (!std::strcmp(env, "error")) return LogLevel::error;
    if (!std::strcmp(env, "off")) return LogLevel::off;
    return LogLevel::warn;
}

std::atomic<int>& threshold() {
    static std::atomic<int> t{int(from_env())};
    return t;
}

const char* tag(LogLevel level) {
    switch (level) {
        case LogLevel::debug: return "debug";
        case LogLevel::info: return "info";
        case LogLevel::warn: return "warn";
        case LogLevel::error: return "error";
        default: return "";
    }
}

}  // namespace

LogLevel log_threshold() { return LogLevel(threshold().load()); }

void set_log_threshold(LogLevel level) { threshold().store(int(level)); }

void log_message(LogLevel level, const std::string& msg) {
    if (int(level) < threshold().load()) return;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    std::cerr << "[sklab " << tag(level) << "] " << msg << '\n';
}

}  // namespace sklab
