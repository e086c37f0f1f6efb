#include "srrt/runtime/resource.hpp"

#include "srrt/error.hpp"

#include <atomic>

namespace srrt {

namespace {

std::atomic<std::uint64_t> next_rid{1};

struct NewProcessCall {
    const ProcFn* body;
    Value arg;
    Value result;
};

}  // namespace

Resource::Resource(std::string name) : rid_(next_rid++), name_(std::move(name)) {}

void Resource::claim_name(const std::string& name) const
{
    if (procs_.find(name) != procs_.end() || ops_.find(name) != ops_.end())
        throw Error(Errc::conflict, "resource '" + name_ + "' already defines '" + name + "'");
}

void Resource::define_proc(std::string name, ProcFn body)
{
    claim_name(name);
    procs_.emplace(std::move(name), std::move(body));
}

void Resource::define_op(std::string name, ProcFn handler)
{
    claim_name(name);
    auto label = static_cast<std::int64_t>(ops_.size());
    ops_.emplace(std::move(name),
                 ServedOp{std::move(handler), std::make_unique<OperationQueue>(label)});
}

const ProcFn& Resource::find_proc(std::string_view name) const
{
    auto it = procs_.find(name);
    if (it == procs_.end())
        throw Error(Errc::not_found, "resource '" + name_ + "' has no proc '" + std::string(name) + "'");
    return it->second;
}

Resource::ServedOp& Resource::find_op(std::string_view name)
{
    auto it = ops_.find(name);
    if (it == ops_.end())
        throw Error(Errc::not_found,
                    "resource '" + name_ + "' has no operation '" + std::string(name) + "'");
    return it->second;
}

OperationQueue& Resource::op_queue(std::string_view name) { return *find_op(name).queue; }

Pid Resource::start_server(std::string_view op_name)
{
    ServedOp& op = find_op(op_name);
    return spawn([&op] {
        for (;;) {
            Invocation& inv = op.queue->accept();
            reply(inv, op.handler(inv.payload));
        }
    });
}

Value Resource::call_proc_new_process(std::string_view proc_name, Value arg)
{
    NewProcessCall frame{&find_proc(proc_name), arg, 0};
    Runtime& rt = Runtime::active();
    Pid pid = rt.spawn([f = &frame] { f->result = (*f->body)(f->arg); });
    rt.join(pid);
    return frame.result;
}

Value Resource::call_proc_served(std::string_view op_name, Value arg)
{
    ServedOp& op = find_op(op_name);
    Runtime& rt = Runtime::active();
    Invocation inv;
    inv.caller = rt.self();
    inv.payload = arg;
    inv.reply = op.handler(inv.payload);
    inv.replied = true;
    return inv.reply;
}

}  // namespace srrt
