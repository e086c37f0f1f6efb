#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace srrt {

enum class Errc {
    invalid_argument,
    conflict,
    invalid_target,
    invalid_state,
    not_found,
    deadlock,
    capacity,
    io,
    config,
    environment,
};

std::string_view to_string(Errc code) noexcept;

/// Error raised by every srrt module. The code selects the CLI exit status.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

}  // namespace srrt
