#pragma once
// Shared scalar aliases and the error type used across the library.

#include <stdexcept>
#include <string>
#include <utility>

namespace fogstream {

// Simulated time, milliseconds. Continuous: link and service times are
// generally non-integral.
using SimTime = double;
// Device processing capacity, million instructions per second.
using Mips = double;
// Per-tuple processing cost, million instructions.
using Mi = double;
// Payload and transfer sizes, bytes (bandwidths are bytes per millisecond).
using Bytes = double;

// Error with a stable machine-readable code. The CLI maps any Error raised
// during configuration or validation to exit code 2.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error("[" + code + "] " + message), code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

[[noreturn]] inline void raise(const std::string& code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace fogstream
