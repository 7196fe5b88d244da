#include "barfi/log.hpp"

#include <atomic>
#include <cstdlib>
#include <cstdio>
#include <string>

namespace barfi::log {

namespace {

Level from_env() {
    const char* raw = std::getenv("BARFI_LOG");
    if (raw == nullptr) return Level::Warn;
    const std::string v(raw);
    if (v == "error") return Level::Error;
    if (v == "info") return Level::Info;
    if (v == "debug") return Level::Debug;
    return Level::Warn;
}

std::atomic<int>& current() {
    static std::atomic<int> level{static_cast<int>(from_env())};
    return level;
}

const char* tag(Level level) {
    switch (level) {
        case Level::Error: return "error";
        case Level::Warn: return "warn";
        case Level::Info: return "info";
        case Level::Debug: return "debug";
    }
    return "?";
}

}  // namespace

Level threshold() { return static_cast<Level>(current().load()); }

void set_threshold(Level level) { current().store(static_cast<int>(level)); }

bool enabled(Level level) { return static_cast<int>(level) <= current().load(); }

void write(Level level, std::string_view message) {
    if (!enabled(level)) return;
    std::fprintf(stderr, "[barfi %s] %.*s\n", tag(level), static_cast<int>(message.size()), message.data());
}

}  // namespace barfi::log
