#include "graphem/log.hpp"

#include <cstdlib>
#include <string>

namespace graphem::log {

Level level() {
    static const Level lv = [] {
        const char* env = std::getenv("GRAPHEM_LOG");
        if (!env) return Level::Warn;
        const std::string s(env);
        if (s == "error") return Level::Error;
        if (s == "info") return Level::Info;
        if (s == "debug") return Level::Debug;
        return Level::Warn;
    }();
    return lv;
}

}  // namespace graphem::log
