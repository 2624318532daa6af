#pragma once

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>

namespace cob::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// COB_LOG env var: error | warn | info | debug. Default warn.
inline Level level() {
    static const Level lv = [] {
        const char* e = std::getenv("COB_LOG");
        const std::string s = e ? e : "";
        if (s == "error") return Level::Error;
        if (s == "info") return Level::Info;
        if (s == "debug") return Level::Debug;
        return Level::Warn;
    }();
    return lv;
}

inline bool enabled(Level l) {
    return static_cast<int>(l) <= static_cast<int>(level());
}

}  // namespace cob::log

#define COB_LOG_AT(lvl, tag, expr)                                      \
    do {                                                                \
        if (::cob::log::enabled(lvl)) {                                 \
            std::ostringstream cob_log_oss_;                            \
            cob_log_oss_ << expr;                                       \
            std::cerr << "[cob " tag "] " << cob_log_oss_.str() << "\n"; \
        }                                                               \
    } while (0)

#define COB_LOG_ERROR(expr) COB_LOG_AT(::cob::log::Level::Error, "error", expr)
#define COB_LOG_WARN(expr) COB_LOG_AT(::cob::log::Level::Warn, "warn", expr)
#define COB_LOG_INFO(expr) COB_LOG_AT(::cob::log::Level::Info, "info", expr)
#define COB_LOG_DEBUG(expr) COB_LOG_AT(::cob::log::Level::Debug, "debug", expr)
