#pragma once

#include <stdexcept>
#include <string>

namespace histrisk {

// User-correctable problems with inputs. The CLI maps these to exit code 1.
class InputError : public std::invalid_argument {
public:
    explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

// Design matrix without full column rank.
class SingularityError : public InputError {
public:
    SingularityError(const std::string& what, std::string column)
        : InputError(what), column_(std::move(column)) {}

    const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

}  // namespace histrisk
