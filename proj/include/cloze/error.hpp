#pragma once

#include <sstream>
#include <stdexcept>
#include <string>

namespace cloze {

// Fatal pipeline error. Stage postconditions that cannot hold throw this;
// the CLI maps it to a non-zero exit status.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {
inline void fail_append(std::ostringstream&) {}
template <typename T, typename... Rest>
void fail_append(std::ostringstream& os, const T& v, const Rest&... rest) {
  os << v;
  fail_append(os, rest...);
}
}  // namespace detail

template <typename... Parts>
[[noreturn]] void fail(const Parts&... parts) {
  std::ostringstream os;
  detail::fail_append(os, parts...);
  throw Error(os.str());
}

template <typename... Parts>
void require(bool condition, const Parts&... parts) {
  if (!condition) fail(parts...);
}

}  // namespace cloze
