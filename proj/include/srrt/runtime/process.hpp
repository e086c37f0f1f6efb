#pragma once

#include "srrt/csw/context.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>

namespace srrt {

using Pid = std::uint64_t;
using Value = std::int64_t;

enum class ProcessState { ready, running, blocked, dead };

/// What a blocked process is waiting for. Carried in block/wake trace events.
enum class WaitKind : std::uint8_t { none, semaphore, receive, accept, reply, join };

struct Invocation;

namespace detail {

struct Process;

/// Intrusive FIFO of processes. A process sits in at most one queue at a time
/// (the ready queue or one wait queue), so the link lives in the process.
class ProcessQueue {
public:
    bool empty() const noexcept { return head_ == nullptr; }
    std::size_t size() const noexcept { return size_; }
    Process* front() const noexcept { return head_; }

    inline void push_back(Process* p) noexcept;
    inline Process* pop_front() noexcept;

    template <typename F>
    void for_each(F&& f) const;

private:
    Process* head_ = nullptr;
    Process* tail_ = nullptr;
    std::size_t size_ = 0;
};

struct Process {
    Pid pid = 0;
    ProcessState state = ProcessState::ready;
    std::unique_ptr<csw::Stack> stack;
    std::unique_ptr<csw::Context> ctx;
    std::function<void()> body;
    Process* next = nullptr;
    ProcessQueue join_waiters;
    WaitKind waiting_on = WaitKind::none;
    std::int64_t wait_label = 0;
    Value mailbox = 0;
    Invocation* invocation = nullptr;
};

void ProcessQueue::push_back(Process* p) noexcept
{
    p->next = nullptr;
    if (tail_ != nullptr)
        tail_->next = p;
    else
        head_ = p;
    tail_ = p;
    ++size_;
}

Process* ProcessQueue::pop_front() noexcept
{
    Process* p = head_;
    if (p == nullptr) return nullptr;
    head_ = p->next;
    if (head_ == nullptr) tail_ = nullptr;
    p->next = nullptr;
    --size_;
    return p;
}

template <typename F>
void ProcessQueue::for_each(F&& f) const
{
    for (Process* p = head_; p != nullptr; p = p->next) f(*p);
}

}  // namespace detail
}  // namespace srrt
