// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

namespace gsim {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

void set_log_level(LogLevel level);
LogLevel log_level();
bool set_log_level(const std::string& name);  // "error"/"warn"/"info"/"debug"

void log(LogLevel level, const std::string& msg);

inline void log_error(const std::string& msg) { log(LogLevel::error, msg); }
inline void log_warn(const std::string& msg) { log(LogLevel::warn, msg); }
inline void log_info(const std::string& msg) { log(LogLevel::info, msg); }
inline void log_debug(const std::string& msg) { log(LogLevel::debug, msg); }

}  // namespace gsim
