#pragma once

#include <stdexcept>
#include <string>

namespace gm {

// Error categories shared by the whole library; the C API maps them 1:1
// onto gm_status codes.
enum class Errc {
    io = 1,
    parse = 2,
    invalid_argument = 3,
    not_found = 4,
    mismatch = 5,
    bad_version = 6,
    bad_checksum = 7,
    degenerate = 8,
    empty = 9,
    internal = 10,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

} // namespace gm
