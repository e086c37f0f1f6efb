#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>

namespace srrt::csw {

inline constexpr std::size_t kDefaultStackSize = 64 * 1024;
inline constexpr std::size_t kDefaultCanaryLen = 64;
inline constexpr std::size_t kMinStackSize = 4096;
inline constexpr std::size_t kMinCanaryLen = 64;
inline constexpr std::array<std::byte, 4> kCanaryPattern{std::byte{0xDE}, std::byte{0xAD},
                                                         std::byte{0xBE}, std::byte{0xEF}};

/// A stack buffer with a canary-filled guard region at each end.
///
/// Stacks grow toward lower addresses, so the guard at the low end of the
/// buffer (the deep end) catches overflow and the guard at the high end (the
/// shallow end) catches writes above the entry frame. The usable region lies
/// strictly between them. A Stack is pinned in memory: contexts keep a pointer
/// to it.
class Stack {
public:
    Stack(std::size_t size = kDefaultStackSize, std::size_t canary_len = kDefaultCanaryLen);
    Stack(const Stack&) = delete;
    Stack& operator=(const Stack&) = delete;

    std::size_t size() const noexcept { return size_; }
    std::size_t canary_len() const noexcept { return canary_len_; }
    std::size_t usable_size() const noexcept { return size_ - 2 * canary_len_; }

    std::span<std::byte> buffer() noexcept { return {buf_.get(), size_}; }
    std::span<std::byte> usable() noexcept { return {buf_.get() + canary_len_, usable_size()}; }
    std::span<std::byte> deep_guard() noexcept { return {buf_.get(), canary_len_}; }
    std::span<std::byte> shallow_guard() noexcept
    {
        return {buf_.get() + size_ - canary_len_, canary_len_};
    }

    bool deep_guard_intact() const noexcept;
    bool shallow_guard_intact() const noexcept;

    /// Refills both guards with the canary pattern.
    void rearm() noexcept;

    /// True while a live Context runs on this stack.
    bool bound() const noexcept { return bound_; }

private:
    friend class Context;

    std::unique_ptr<std::byte[]> buf_;
    std::size_t size_;
    std::size_t canary_len_;
    bool bound_ = false;
};

/// Throws Error(invalid_argument) unless size >= 4096, canary_len >= 64 and
/// 2 * canary_len < size.
void validate_stack_geometry(std::size_t size, std::size_t canary_len);

std::unique_ptr<Stack> alloc_stack(std::size_t size = kDefaultStackSize,
                                   std::size_t canary_len = kDefaultCanaryLen);

}  // namespace srrt::csw
