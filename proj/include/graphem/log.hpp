#pragma once

// Minimal stderr logging; verbosity from the GRAPHEM_LOG environment variable
// (error, warn, info, debug). Default: warn.

#include <iostream>
#include <sstream>
#include <string_view>

namespace graphem::log {

enum class Level { Error = 0, Warn = 1, Info = 2, Debug = 3 };

Level level();

template <typename... Args>
void write(Level lv, std::string_view tag, const Args&... args) {
    if (static_cast<int>(lv) > static_cast<int>(level())) return;
    std::ostringstream os;
    os << "[graphem " << tag << "] ";
    (os << ... << args);
    os << '\n';
    std::cerr << os.str();
}

template <typename... Args>
void warn(const Args&... args) { write(Level::Warn, "warn", args...); }
template <typename... Args>
void info(const Args&... args) { write(Level::Info, "info", args...); }
template <typename... Args>
void debug(const Args&... args) { write(Level::Debug, "debug", args...); }

}  // namespace graphem::log
