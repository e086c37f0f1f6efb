#include "srrt/subprocess.hpp"

#include "srrt/error.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <iostream>
#include <thread>

namespace srrt {

namespace {

using Clock = std::chrono::steady_clock;

struct Pipe {
    int read_end = -1;
    int write_end = -1;

    Pipe()
    {
        int fds[2];
        if (::pipe(fds) != 0)
            throw Error(Errc::io, std::string("pipe: ") + std::strerror(errno));
        read_end = fds[0];
        write_end = fds[1];
    }
    ~Pipe()
    {
        close_read();
        close_write();
    }
    void close_read()
    {
        if (read_end >= 0) ::close(read_end);
        read_end = -1;
    }
    void close_write()
    {
        if (write_end >= 0) ::close(write_end);
        write_end = -1;
    }
};

ChildOutcome collect(pid_t pid, Pipe& pipe, std::chrono::milliseconds timeout)
{
    ChildOutcome outcome;
    const auto deadline = Clock::now() + timeout;
    pipe.close_write();

    char buf[4096];
    bool eof = false;
    while (!eof) {
        auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
        if (left.count() <= 0) {
            outcome.timed_out = true;
            break;
        }
        pollfd pfd{pipe.read_end, POLLIN, 0};
        int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
        if (rc < 0) {
            if (errno == EINTR) continue;
            break;
        }
        if (rc == 0) continue;
        ssize_t n = ::read(pipe.read_end, buf, sizeof buf);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0)
            eof = true;
        else
            outcome.output.append(buf, static_cast<std::size_t>(n));
    }

    int status = 0;
    for (;;) {
        pid_t r = ::waitpid(pid, &status, WNOHANG);
        if (r == pid) break;
        if (r < 0 && errno != EINTR) return outcome;
        if (outcome.timed_out || Clock::now() >= deadline) {
            outcome.timed_out = true;
            ::kill(pid, SIGKILL);
            while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {}
            return outcome;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    if (WIFEXITED(status))
        outcome.exit_code = WEXITSTATUS(status);
    else if (WIFSIGNALED(status))
        outcome.term_signal = WTERMSIG(status);
    return outcome;
}

// Children must die of their own signals, not the parent's crash handlers.
void restore_default_signals()
{
    for (int sig : {SIGSEGV, SIGBUS, SIGILL, SIGFPE, SIGABRT, SIGTRAP, SIGALRM, SIGTERM})
        ::signal(sig, SIG_DFL);
}

void flush_parent_streams()
{
    std::cout.flush();
    std::cerr.flush();
    std::fflush(nullptr);
}

}  // namespace

std::string ChildOutcome::describe() const
{
    if (timed_out) return "timed out";
    if (term_signal != 0) return std::string("killed by signal ") + std::to_string(term_signal) +
                                 " (" + ::strsignal(term_signal) + ")";
    return "exit status " + std::to_string(exit_code);
}

void write_all(int fd, std::string_view data)
{
    while (!data.empty()) {
        ssize_t n = ::write(fd, data.data(), data.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            return;
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
}

ChildOutcome run_in_child(const std::function<int(int out_fd)>& body,
                          std::chrono::milliseconds timeout)
{
    Pipe pipe;
    flush_parent_streams();
    pid_t pid = ::fork();
    if (pid < 0) throw Error(Errc::io, std::string("fork: ") + std::strerror(errno));
    if (pid == 0) {
        restore_default_signals();
        pipe.close_read();
        int code = 1;
        try {
            code = body(pipe.write_end);
        } catch (const std::exception& e) {
            std::string msg = std::string("uncaught exception: ") + e.what() + "\n";
            write_all(STDERR_FILENO, msg);
        } catch (...) {
            write_all(STDERR_FILENO, "uncaught non-standard exception\n");
        }
        ::_exit(code);
    }
    return collect(pid, pipe, timeout);
}

ChildOutcome run_command(const std::vector<std::string>& argv, std::chrono::milliseconds timeout)
{
    if (argv.empty()) throw Error(Errc::invalid_argument, "empty command");
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);

    Pipe pipe;
    flush_parent_streams();
    pid_t pid = ::fork();
    if (pid < 0) throw Error(Errc::io, std::string("fork: ") + std::strerror(errno));
    if (pid == 0) {
        restore_default_signals();
        ::dup2(pipe.write_end, STDOUT_FILENO);
        pipe.close_read();
        pipe.close_write();
        ::execvp(args[0], args.data());
        std::string msg = argv[0] + ": " + std::strerror(errno) + "\n";
        write_all(STDERR_FILENO, msg);
        ::_exit(127);
    }
    return collect(pid, pipe, timeout);
}

}  // namespace srrt
