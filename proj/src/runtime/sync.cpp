#include "srrt/runtime/sync.hpp"

#include "srrt/error.hpp"

namespace srrt {

void Semaphore::p()
{
    if (count_ > 0) {
        --count_;
        return;
    }
    Runtime& rt = Runtime::active();
    auto& me = rt.running_process("P");
    waiters_.push_back(&me);
    rt.block_current(WaitKind::semaphore, label_);
}

void Semaphore::v()
{
    if (detail::Process* waiter = waiters_.pop_front())
        Runtime::active().wake(*waiter);
    else
        ++count_;
}

void OperationQueue::send(Value msg)
{
    detail::Process* head = receivers_.front();
    if (head == nullptr) {
        messages_.push_back(msg);
        return;
    }
    if (head->waiting_on != WaitKind::receive)
        throw Error(Errc::invalid_state, "send to an operation whose waiters are accepting calls");
    receivers_.pop_front();
    head->mailbox = msg;
    Runtime::active().wake(*head);
}

Value OperationQueue::receive()
{
    if (!messages_.empty()) {
        Value msg = messages_.front();
        messages_.pop_front();
        return msg;
    }
    if (!invocations_.empty())
        throw Error(Errc::invalid_state, "receive on an operation holding pending calls");
    Runtime& rt = Runtime::active();
    auto& me = rt.running_process("receive");
    receivers_.push_back(&me);
    rt.block_current(WaitKind::receive, label_);
    return me.mailbox;
}

Value OperationQueue::call(Value payload)
{
    Runtime& rt = Runtime::active();
    auto& me = rt.running_process("call");
    Invocation inv;
    inv.caller = me.pid;
    inv.payload = payload;
    inv.caller_process = &me;

    detail::Process* head = receivers_.front();
    if (head != nullptr) {
        if (head->waiting_on != WaitKind::accept)
            throw Error(Errc::invalid_state, "call to an operation whose waiters are receiving messages");
        receivers_.pop_front();
        head->invocation = &inv;
        rt.wake(*head);
    } else {
        invocations_.push_back(&inv);
    }
    rt.block_current(WaitKind::reply, label_);
    return inv.reply;
}

Invocation& OperationQueue::accept()
{
    if (!invocations_.empty()) {
        Invocation* inv = invocations_.front();
        invocations_.pop_front();
        return *inv;
    }
    if (!messages_.empty())
        throw Error(Errc::invalid_state, "accept on an operation holding pending messages");
    Runtime& rt = Runtime::active();
    auto& me = rt.running_process("accept");
    receivers_.push_back(&me);
    rt.block_current(WaitKind::accept, label_);
    return *me.invocation;
}

void reply(Invocation& inv, Value value)
{
    if (inv.replied)
        throw Error(Errc::invalid_state, "invocation from pid " + std::to_string(inv.caller) +
                                             " was already replied to");
    inv.reply = value;
    inv.replied = true;
    Runtime::active().wake(*inv.caller_process);
}

}  // namespace srrt
