#include "srrt/error.hpp"

namespace srrt {

std::string_view to_string(Errc code) noexcept
{
    switch (code) {
    case Errc::invalid_argument: return "invalid argument";
    case Errc::conflict: return "conflict";
    case Errc::invalid_target: return "invalid target";
    case Errc::invalid_state: return "invalid state";
    case Errc::not_found: return "not found";
    case Errc::deadlock: return "deadlock";
    case Errc::capacity: return "capacity exhausted";
    case Errc::io: return "i/o error";
    case Errc::config: return "configuration error";
    case Errc::environment: return "environment error";
    }
    return "unknown error";
}

}  // namespace srrt
