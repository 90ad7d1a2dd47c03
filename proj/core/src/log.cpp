// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#include "gsim/log.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>

namespace gsim {

namespace {
std::atomic<LogLevel> g_level{LogLevel::info};
std::mutex g_mutex;

const char* level_tag(LogLevel l) {
    switch (l) {
        case LogLevel::error: return "error";
        case LogLevel::warn: return "warn";
        case LogLevel::info: return "info";
        case LogLevel::debug: return "debug";
    }
    return "?";
}
}  // namespace

void set_log_level(LogLevel level) { g_level.store(level); }
LogLevel log_level() { return g_level.load(); }

bool set_log_level(const std::string& name) {
    if (name == "error") { set_log_level(LogLevel::error); return true; }
    if (name == "warn") { set_log_level(LogLevel::warn); return true; }
    if (name == "info") { set_log_level(LogLevel::info); return true; }
    if (name == "debug") { set_log_level(LogLevel::debug); return true; }
    return false;
}

void log(LogLevel level, const std::string& msg) {
    if (static_cast<int>(level) > static_cast<int>(g_level.load())) return;
    std::lock_guard<std::mutex> lock(g_mutex);
    std::fprintf(stderr, "[gsim:%s] %s\n", level_tag(level), msg.c_str());
}

}  // namespace gsim
