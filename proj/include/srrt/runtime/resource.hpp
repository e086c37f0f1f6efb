#pragma once

#include "srrt/runtime/sync.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace srrt {

using ProcFn = std::function<Value(Value)>;

/// A named unit of procedures and served operations, the target of
/// inter-resource calls.
///
/// A proc called through call_proc_new_process() runs in a freshly created
/// process that the caller joins. A served operation is an invocation of a
/// handler owned by the resource: call_proc_served() builds the Invocation and
/// runs the handler in the calling process, so no process is created and no
/// switch happens. The same operation's queue can additionally be served by a
/// long-lived process (start_server) for clients that rendezvous on it.
class Resource {
public:
    explicit Resource(std::string name);
    Resource(const Resource&) = delete;
    Resource& operator=(const Resource&) = delete;

    std::uint64_t rid() const noexcept { return rid_; }
    const std::string& name() const noexcept { return name_; }

    /// Throws Error(conflict) when the name is already taken in this resource.
    void define_proc(std::string name, ProcFn body);
    void define_op(std::string name, ProcFn handler);

    /// Throws Error(not_found) for an unknown operation.
    OperationQueue& op_queue(std::string_view name);

    /// Spawns a process that accepts on the operation's queue forever,
    /// replying with the handler's result.
    Pid start_server(std::string_view op_name);

    Value call_proc_new_process(std::string_view proc_name, Value arg);
    Value call_proc_served(std::string_view op_name, Value arg);

private:
    struct ServedOp {
        ProcFn handler;
        std::unique_ptr<OperationQueue> queue;
    };

    const ProcFn& find_proc(std::string_view name) const;
    ServedOp& find_op(std::string_view name);
    void claim_name(const std::string& name) const;

    std::uint64_t rid_;
    std::string name_;
    std::map<std::string, ProcFn, std::less<>> procs_;
    std::map<std::string, ServedOp, std::less<>> ops_;
};

inline Value call_proc_new_process(Resource& r, std::string_view proc_name, Value arg)
{
    return r.call_proc_new_process(proc_name, arg);
}

inline Value call_proc_served(Resource& r, std::string_view op_name, Value arg)
{
    return r.call_proc_served(op_name, arg);
}

}  // namespace srrt
