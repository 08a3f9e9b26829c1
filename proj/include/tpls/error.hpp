#pragma once

#include <stdexcept>
#include <string>

namespace tpls {

// Error categories map 1:1 onto CLI exit codes and the machine-readable
// "category" field printed on stderr.
enum class ErrorCategory { usage = 2, config = 3, io = 4, shape = 5, compute = 6 };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

  const char* category_name() const noexcept {
    switch (category_) {
      case ErrorCategory::usage: return "usage";
      case ErrorCategory::config: return "config";
      case ErrorCategory::io: return "io";
      case ErrorCategory::shape: return "shape";
      case ErrorCategory::compute: return "compute";
    }
    return "unknown";
  }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void throw_shape(const std::string& msg) {
  throw Error(ErrorCategory::shape, msg);
}

[[noreturn]] inline void throw_compute(const std::string& msg) {
  throw Error(ErrorCategory::compute, msg);
}

[[noreturn]] inline void throw_io(const std::string& msg) {
  throw Error(ErrorCategory::io, msg);
}

[[noreturn]] inline void throw_config(const std::string& msg) {
  throw Error(ErrorCategory::config, msg);
}

}  // namespace tpls
