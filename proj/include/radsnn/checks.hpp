#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace radsnn {

// Base error for all failures raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input file; carries a human-readable offset in the message.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(what) {}
};

namespace detail {

template <typename... Args>
std::string format_message(Args&&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

[[noreturn]] inline void check_failed(const char* expr, const char* file, int line,
                                      const std::string& msg) {
  std::ostringstream os;
  os << file << ":" << line << ": check failed: " << expr;
  if (!msg.empty()) os << " — " << msg;
  throw Error(os.str());
}

}  // namespace detail
}  // namespace radsnn

#define RAD_CHECK(cond, ...)                                                        \
  do {                                                                              \
    if (!(cond)) {                                                                  \
      ::radsnn::detail::check_failed(#cond, __FILE__, __LINE__,                     \
                                     ::radsnn::detail::format_message(__VA_ARGS__)); \
    }                                                                               \
  } while (0)
