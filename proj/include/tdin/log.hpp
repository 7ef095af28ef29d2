#pragma once

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

namespace tdin::log {

enum class Level { kQuiet = 0, kWarn = 1, kInfo = 2, kDebug = 3 };

// Verbosity comes from the TDIN_LOG environment variable:
// quiet | warn | info (default) | debug. All output goes to stderr so that
// artifact streams stay clean.
inline Level level() {
    static const Level lvl = [] {
        const char* env = std::getenv("TDIN_LOG");
        if (env == nullptr) return Level::kInfo;
        const std::string v(env);
        if (v == "quiet") return Level::kQuiet;
        if (v == "warn") return Level::kWarn;
        if (v == "debug") return Level::kDebug;
        return Level::kInfo;
    }();
    return lvl;
}

inline void emit(Level at, const std::string& tag, const std::string& msg) {
    if (static_cast<int>(level()) >= static_cast<int>(at)) {
        std::cerr << "[" << tag << "] " << msg << "\n";
    }
}

inline void warn(const std::string& msg) { emit(Level::kWarn, "warn", msg); }
inline void info(const std::string& msg) { emit(Level::kInfo, "info", msg); }
inline void debug(const std::string& msg) { emit(Level::kDebug, "debug", msg); }

}  // namespace tdin::log
