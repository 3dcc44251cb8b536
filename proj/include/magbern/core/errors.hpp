#pragma once

#include <stdexcept>
#include <string>

namespace magbern {

/// Error categories double as process exit codes for the command-line tool.
enum class ErrorCategory : int {
    falsified = 1,   // an inequality check came out false
    validation = 2,  // bad input or violated precondition
    numerical = 3,   // non-convergence, ill-conditioning, void inequality
    resource = 4,    // configured size or iteration cap exceeded
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    [[nodiscard]] ErrorCategory category() const noexcept { return category_; }
    [[nodiscard]] int exit_code() const noexcept { return static_cast<int>(category_); }

  private:
    ErrorCategory category_;
};

class ValidationError : public Error {
  public:
    explicit ValidationError(const std::string& what)
        : Error(ErrorCategory::validation, what) {}
};

class NumericalError : public Error {
  public:
    explicit NumericalError(const std::string& what)
        : Error(ErrorCategory::numerical, what) {}
};

class ResourceError : public Error {
  public:
    explicit ResourceError(const std::string& what)
        : Error(ErrorCategory::resource, what) {}
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw ValidationError(message);
}

}  // namespace magbern
