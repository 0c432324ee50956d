#pragma once

#include <sstream>
#include <string>

namespace tilepath {

enum class LogLevel { off = 0, error = 1, info = 2, debug = 3 };

/// Level parsed once from the TILEPATH_LOG environment variable
/// (off|error|info|debug).
LogLevel log_level();

void log_message(LogLevel level, const std::string& msg);

}  // namespace tilepath

#define TILEPATH_LOG_AT(lvl, expr)                                   \
    do {                                                             \
        if (static_cast<int>(::tilepath::log_level()) >=             \
            static_cast<int>(::tilepath::LogLevel::lvl)) {           \
            std::ostringstream os_;                                  \
            os_ << expr;                                             \
            ::tilepath::log_message(::tilepath::LogLevel::lvl, os_.str()); \
        }                                                            \
    } while (0)

#define TILEPATH_INFO(expr) TILEPATH_LOG_AT(info, expr)
#define TILEPATH_DEBUG(expr) TILEPATH_LOG_AT(debug, expr)
#define TILEPATH_ERROR(expr) TILEPATH_LOG_AT(error, expr)
