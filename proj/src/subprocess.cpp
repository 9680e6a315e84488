#include "gsdkit/subprocess.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>

#include "gsdkit/error.hpp"

namespace gsdkit {
namespace {

constexpr std::size_t kStderrCap = 64 * 1024;
constexpr std::size_t kExcerptChars = 2048;

}  // namespace

ProcessResult run_process(const std::string& command, double timeout_seconds) {
    int err_pipe[2];
    if (pipe(err_pipe) != 0) fail("IoError", std::string("pipe: ") + std::strerror(errno));

    const pid_t pid = fork();
    if (pid < 0) {
        close(err_pipe[0]);
        close(err_pipe[1]);
        fail("IoError", std::string("fork: ") + std::strerror(errno));
    }

    if (pid == 0) {
        setpgid(0, 0);  // own process group so a timeout kill reaps children too
        close(err_pipe[0]);
        const int devnull = open("/dev/null", O_RDWR);
        if (devnull >= 0) {
            dup2(devnull, STDIN_FILENO);
            dup2(devnull, STDOUT_FILENO);
            close(devnull);
        }
        dup2(err_pipe[1], STDERR_FILENO);
        close(err_pipe[1]);
        execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }

    close(err_pipe[1]);

    ProcessResult result;
    std::string captured;
    bool pipe_open = true;
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::duration<double>(timeout_seconds);

    while (pipe_open) {
        const auto remaining = deadline - std::chrono::steady_clock::now();
        if (remaining <= std::chrono::steady_clock::duration::zero()) {
            result.timed_out = true;
            kill(-pid, SIGKILL);
            kill(pid, SIGKILL);
            break;
        }
        const int wait_ms = static_cast<int>(std::min<std::int64_t>(
            200, std::chrono::duration_cast<std::chrono::milliseconds>(remaining).count() + 1));

        pollfd pfd{err_pipe[0], POLLIN, 0};
        const int rc = poll(&pfd, 1, wait_ms);
        if (rc > 0) {
            char buf[4096];
            const ssize_t got = read(err_pipe[0], buf, sizeof(buf));
            if (got > 0) {
                if (captured.size() < kStderrCap)
                    captured.append(buf, buf + std::min<std::size_t>(got, kStderrCap - captured.size()));
            } else {
                pipe_open = false;  // EOF or error: child side closed
            }
        } else if (rc < 0 && errno != EINTR) {
            pipe_open = false;
        }
    }
    close(err_pipe[0]);

    int status = 0;
    while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }

    if (WIFEXITED(status)) {
        result.exit_code = WEXITSTATUS(status);
    } else if (WIFSIGNALED(status)) {
        result.exit_code = 128 + WTERMSIG(status);
    }

    if (captured.size() > kExcerptChars)
        captured.erase(0, captured.size() - kExcerptChars);  // keep the tail
    result.stderr_excerpt = std::move(captured);
    return result;
}

}  // namespace gsdkit
