#include "tilepath/log.hpp"

#include <cstdlib>
#include <iostream>

namespace tilepath {

LogLevel log_level() {
    static LogLevel level = [] {
        const char* env = std::getenv("TILEPATH_LOG");
        if (!env) return LogLevel::error;
        std::string s(env);
        if (s == "off") return LogLevel::off;
        if (s == "info") return LogLevel::info;
        if (s == "debug") return LogLevel::debug;
        return LogLevel::error;
    }();
    return level;
}

void log_message(LogLevel level, const std::string& msg) {
    const char* tag = level == LogLevel::error ? "error" : level == LogLevel::info ? "info" : "debug";
    std::cerr << "[tilepath:" << tag << "] " << msg << '\n';
}

}  // namespace tilepath
