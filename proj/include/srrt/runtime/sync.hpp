#pragma once

#include "srrt/runtime/runtime.hpp"

#include <deque>

namespace srrt {

/// Counting semaphore with a FIFO wait queue.
///
/// V hands the semaphore to the oldest waiter by making it ready; the caller
/// keeps running. Whenever count() > 0 the wait queue is empty.
class Semaphore {
public:
    explicit Semaphore(std::size_t initial = 0, std::int64_t label = 0)
        : count_(initial), label_(label)
    {
    }
    Semaphore(const Semaphore&) = delete;
    Semaphore& operator=(const Semaphore&) = delete;

    void p();
    void v();

    std::size_t count() const noexcept { return count_; }
    std::size_t waiting() const noexcept { return waiters_.size(); }
    std::int64_t label() const noexcept { return label_; }

private:
    std::size_t count_;
    std::int64_t label_;
    detail::ProcessQueue waiters_;
};

inline void sem_p(Semaphore& s) { s.p(); }
inline void sem_v(Semaphore& s) { s.v(); }

/// An accepted call. Lives on the caller's stack until the reply arrives.
struct Invocation {
    Pid caller = 0;
    Value payload = 0;
    Value reply = 0;
    bool replied = false;
    detail::Process* caller_process = nullptr;
};

/// Stores the reply and makes the caller ready. The server keeps running.
/// Throws Error(invalid_state) on a second reply.
void reply(Invocation& inv, Value value);

/// An SR-style operation: asynchronous messages (send/receive) or rendezvous
/// invocations (call/accept/reply) through one FIFO of blocked receivers.
///
/// A queue serves one style at a time; handing a message to a process blocked
/// in accept (or an invocation to one blocked in receive) is an invalid-state
/// error. Sends never block.
class OperationQueue {
public:
    explicit OperationQueue(std::int64_t label = 0) : label_(label) {}
    OperationQueue(const OperationQueue&) = delete;
    OperationQueue& operator=(const OperationQueue&) = delete;

    void send(Value msg);
    Value receive();
    Value call(Value payload);
    Invocation& accept();

    std::size_t pending_messages() const noexcept { return messages_.size(); }
    std::size_t pending_invocations() const noexcept { return invocations_.size(); }
    std::size_t waiting() const noexcept { return receivers_.size(); }
    std::int64_t label() const noexcept { return label_; }

private:
    std::int64_t label_;
    std::deque<Value> messages_;
    std::deque<Invocation*> invocations_;
    detail::ProcessQueue receivers_;
};

inline void op_send(OperationQueue& q, Value msg) { q.send(msg); }
inline Value op_receive(OperationQueue& q) { return q.receive(); }
inline Value op_call(OperationQueue& q, Value payload) { return q.call(payload); }
inline Invocation& op_accept(OperationQueue& q) { return q.accept(); }
inline void op_reply(Invocation& inv, Value value) { reply(inv, value); }

}  // namespace srrt
