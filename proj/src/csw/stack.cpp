#include "srrt/csw/stack.hpp"

#include "srrt/error.hpp"

#include <algorithm>
#include <new>
#include <string>

namespace srrt::csw {

namespace {

void fill_guard(std::span<std::byte> guard) noexcept
{
    for (std::size_t i = 0; i < guard.size(); ++i) guard[i] = kCanaryPattern[i % kCanaryPattern.size()];
}

bool guard_matches(const std::byte* guard, std::size_t len) noexcept
{
    for (std::size_t i = 0; i < len; ++i)
        if (guard[i] != kCanaryPattern[i % kCanaryPattern.size()]) return false;
    return true;
}

}  // namespace

void validate_stack_geometry(std::size_t size, std::size_t canary_len)
{
    if (size < kMinStackSize)
        throw Error(Errc::invalid_argument,
                    "stack size " + std::to_string(size) + " is below the minimum of " +
                        std::to_string(kMinStackSize) + " bytes");
    if (canary_len < kMinCanaryLen)
        throw Error(Errc::invalid_argument, "canary length " + std::to_string(canary_len) +
                                                " is below the minimum of " +
                                                std::to_string(kMinCanaryLen) + " bytes");
    if (2 * canary_len >= size)
        throw Error(Errc::invalid_argument, "guard regions (2 x " + std::to_string(canary_len) +
                                                ") leave no usable stack in " +
                                                std::to_string(size) + " bytes");
}

Stack::Stack(std::size_t size, std::size_t canary_len) : size_(size), canary_len_(canary_len)
{
    validate_stack_geometry(size, canary_len);
    try {
        buf_.reset(new std::byte[size]);
    } catch (const std::bad_alloc&) {
        throw Error(Errc::capacity, "cannot allocate a " + std::to_string(size) + "-byte stack");
    }
    rearm();
}

bool Stack::deep_guard_intact() const noexcept { return guard_matches(buf_.get(), canary_len_); }

bool Stack::shallow_guard_intact() const noexcept
{
    return guard_matches(buf_.get() + size_ - canary_len_, canary_len_);
}

void Stack::rearm() noexcept
{
    fill_guard(deep_guard());
    fill_guard(shallow_guard());
}

std::unique_ptr<Stack> alloc_stack(std::size_t size, std::size_t canary_len)
{
    return std::make_unique<Stack>(size, canary_len);
}

}  // namespace srrt::csw
