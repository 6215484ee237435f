#pragma once

#include <stdexcept>
#include <string>

namespace forgetlens {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad arguments, shapes, labels, degenerate inputs. CLI exit code 2.
struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& msg) : Error(msg) {}
};

// Missing or unreadable files. CLI exit code 3.
struct IoError : Error {
    explicit IoError(const std::string& msg) : Error(msg) {}
};

// Malformed file contents: bad magic, truncation, count mismatches,
// event-log gaps. CLI exit code 4.
struct DataIntegrityError : Error {
    explicit DataIntegrityError(const std::string& msg) : Error(msg) {}
};

// Non-finite values where finite ones are required (aborts the run).
struct NumericError : Error {
    explicit NumericError(const std::string& msg) : Error(msg) {}
};

}  // namespace forgetlens
