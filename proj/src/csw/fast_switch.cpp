// User-space context switch for x86-64 System V.
//
// Saved frame, from the saved stack pointer upward:
//   +0  mxcsr (4 bytes)   +4 x87 control word (2 bytes)   +8 padding
//   +16 r15  +24 r14  +32 r13  +40 r12  +48 rbx  +56 rbp  +64 return address
// A fresh context gets a hand-built frame whose return address is
// srrt_fast_entry, with r12 = argument and r13 = function to call.

#include "fast_switch.hpp"

#if !defined(__x86_64__)
#error "srrt fast backend requires x86-64"
#endif

asm(R"(
    .text
    .globl srrt_fast_switch
    .type srrt_fast_switch, @function
    .p2align 4
srrt_fast_switch:
    pushq %rbp
    pushq %rbx
    pushq %r12
    pushq %r13
    pushq %r14
    pushq %r15
    subq $16, %rsp
    stmxcsr (%rsp)
    fnstcw 4(%rsp)
    movq %rsp, (%rdi)
    movq %rsi, %rsp
    ldmxcsr (%rsp)
    fldcw 4(%rsp)
    addq $16, %rsp
    popq %r15
    popq %r14
    popq %r13
    popq %r12
    popq %rbx
    popq %rbp
    ret
    .size srrt_fast_switch, .-srrt_fast_switch

    .globl srrt_fast_entry
    .type srrt_fast_entry, @function
    .p2align 4
srrt_fast_entry:
    movq %r12, %rdi
    callq *%r13
    ud2
    .size srrt_fast_entry, .-srrt_fast_entry
)");

namespace srrt::csw::detail {

void* fast_prepare_frame(std::byte* top, void (*fn)(void*), void* arg) noexcept
{
    auto aligned = reinterpret_cast<std::uintptr_t>(top) & ~std::uintptr_t{15};
    auto* frame = reinterpret_cast<std::uint64_t*>(aligned - 72);
    frame[0] = 0x037F'0000'1F80ull;  // mxcsr default, x87 control word default
    frame[1] = 0;
    frame[2] = 0;                                        // r15
    frame[3] = 0;                                        // r14
    frame[4] = reinterpret_cast<std::uint64_t>(fn);      // r13
    frame[5] = reinterpret_cast<std::uint64_t>(arg);     // r12
    frame[6] = 0;                                        // rbx
    frame[7] = 0;                                        // rbp
    frame[8] = reinterpret_cast<std::uint64_t>(&srrt_fast_entry);
    return frame;
}

}  // namespace srrt::csw::detail
