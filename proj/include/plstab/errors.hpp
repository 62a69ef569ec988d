#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace plstab {

/// Raised when an argument lies outside the mathematical domain of an operation
/// (zero mass, probability outside [0,1], parameter out of range).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Raised when a numerical precondition of a check fails, e.g. a density that
/// must be log-concave is not. Carries the offending cell indices.
class PreconditionError : public std::invalid_argument {
public:
    PreconditionError(const std::string& check, std::vector<std::size_t> cells = {})
        : std::invalid_argument(describe(check, cells)), check_(check), cells_(std::move(cells)) {}

    [[nodiscard]] const std::string& check() const noexcept { return check_; }
    [[nodiscard]] const std::vector<std::size_t>& cells() const noexcept { return cells_; }

private:
    static std::string describe(const std::string& check, const std::vector<std::size_t>& cells) {
        std::string msg = "precondition failed: " + check;
        if (!cells.empty()) {
            msg += " (cells";
            for (std::size_t k = 0; k < cells.size() && k < 8; ++k) {
                msg += ' ';
                msg += std::to_string(cells[k]);
            }
            if (cells.size() > 8) msg += " ...";
            msg += ')';
        }
        return msg;
    }

    std::string check_;
    std::vector<std::size_t> cells_;
};

}  // namespace plstab
