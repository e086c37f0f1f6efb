#pragma once

#include <cstddef>
#include <cstdint>

extern "C" {
/// Saves the callee-saved state on the current stack, stores the stack
/// pointer in *save_sp and resumes the frame at load_sp.
void srrt_fast_switch(void** save_sp, void* load_sp);
void srrt_fast_entry();
}

namespace srrt::csw::detail {

/// Builds an initial switch frame below `top` so the first switch calls fn(arg).
void* fast_prepare_frame(std::byte* top, void (*fn)(void*), void* arg) noexcept;

}  // namespace srrt::csw::detail
