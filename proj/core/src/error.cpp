#include "roughavg/error.hpp"

namespace roughavg {

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_input: return "invalid-input";
    case ErrorKind::invalid_index: return "invalid-index";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::blow_up: return "blow-up";
    case ErrorKind::unsupported_coefficient: return "unsupported-coefficient";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace roughavg
