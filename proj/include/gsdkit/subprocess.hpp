#pragma once

#include <string>

namespace gsdkit {

struct ProcessResult {
    int exit_code = -1;
    bool timed_out = false;
    std::string stderr_excerpt;
};

// Runs `command` through /bin/sh with stdout discarded and stderr captured
// (tail-truncated to a few KB). On timeout the whole process group is killed
// and timed_out is set; no exception is thrown for nonzero exits.
ProcessResult run_process(const std::string& command, double timeout_seconds);

}  // namespace gsdkit
