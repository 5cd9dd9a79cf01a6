#pragma once

#include <stdexcept>
#include <string>

namespace vqad {

enum class errc {
    invalid_input,
    config,
    transport,
    dataset,
    io,
    undefined_metric,
    cache_miss,
    cache_corrupt,
};

class Error : public std::runtime_error {
public:
    Error(errc kind, const std::string& msg) : std::runtime_error(msg), kind_(kind) {}
    errc kind() const noexcept { return kind_; }

private:
    errc kind_;
};

[[noreturn]] inline void raise(errc kind, const std::string& msg) {
    throw Error(kind, msg);
}

} // namespace vqad
