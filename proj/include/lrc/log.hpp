#pragma once

#include <cstdio>
#include <cstdlib>
#include <string_view>

namespace lrc {

enum class LogLevel { error = 0, info = 1, debug = 2 };

// Level comes from LRC_LOG={error,info,debug}; default is error.
inline LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("LRC_LOG");
        if (env == nullptr) return LogLevel::error;
        const std::string_view v(env);
        if (v == "debug") return LogLevel::debug;
        if (v == "info") return LogLevel::info;
        return LogLevel::error;
    }();
    return level;
}

template <typename... Args>
void log(LogLevel level, const char* fmt, Args... args) {
    if (level > log_level()) return;
    const char* tag = level == LogLevel::error ? "error" : level == LogLevel::info ? "info" : "debug";
    std::fprintf(stderr, "[%s] ", tag);
    std::fprintf(stderr, fmt, args...);
    std::fputc('\n', stderr);
}

}  // namespace lrc
