// Copyright Contributors to the gsim Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace gsim {

// File/stream level failures. The CLI maps these to exit code 1.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad input content or arguments. The CLI maps these to exit code 2.
struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed file layout (e.g. a splat PLY header missing a property).
struct format_error : validation_error {
    explicit format_error(const std::string& msg) : validation_error(msg) {}
};

}  // namespace gsim
