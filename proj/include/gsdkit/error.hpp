#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace gsdkit {

// All toolkit failures carry a stable machine-readable code ("MissingMask",
// "GridError", ...) plus a human-readable detail string. The CLI surfaces the
// code in its JSON error line; tests match on it.
class Error : public std::runtime_error {
public:
    Error(std::string code, std::string detail)
        : std::runtime_error(code + ": " + detail),
          code_(std::move(code)),
          detail_(std::move(detail)) {}

    const std::string& code() const noexcept { return code_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string code_;
    std::string detail_;
};

[[noreturn]] inline void fail(std::string code, const std::string& detail) {
    throw Error(std::move(code), detail);
}

}  // namespace gsdkit
