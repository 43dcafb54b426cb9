#pragma once

#include <stdexcept>
#include <string>

namespace emdash {

enum class ErrorKind {
    input,          // unreadable or unparsable input
    empty_set,      // no usable records
    validation,     // contract violation in caller-supplied data
    undefined_rate, // rate requested over zero words
    empty_cell,     // aggregation cell with no matching samples
    state,          // run ledger does not match the plan
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace emdash
