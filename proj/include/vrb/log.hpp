#pragma once

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace vrb::log {

enum class Level { error = 0, info = 1, debug = 2 };

// Verbosity comes from VRB_LOG (error|info|debug); default is error.
// All log output goes to stderr so stdout stays machine-parseable.
inline Level& level() {
    static Level lvl = [] {
        const char* env = std::getenv("VRB_LOG");
        if (env == nullptr) return Level::error;
        if (std::strcmp(env, "debug") == 0) return Level::debug;
        if (std::strcmp(env, "info") == 0) return Level::info;
        return Level::error;
    }();
    return lvl;
}

inline void vlogf(Level msg_level, const char* tag, const char* fmt, std::va_list args) {
    if (msg_level > level()) return;
    std::fprintf(stderr, "[%s] ", tag);
    std::vfprintf(stderr, fmt, args);
    std::fputc('\n', stderr);
}

inline void error(const char* fmt, ...) {
    std::va_list args;
    va_start(args, fmt);
    vlogf(Level::error, "error", fmt, args);
    va_end(args);
}

inline void info(const char* fmt, ...) {
    std::va_list args;
    va_start(args, fmt);
    vlogf(Level::info, "info", fmt, args);
    va_end(args);
}

inline void debug(const char* fmt, ...) {
    std::va_list args;
    va_start(args, fmt);
    vlogf(Level::debug, "debug", fmt, args);
    va_end(args);
}

} // namespace vrb::log
