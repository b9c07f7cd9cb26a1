#include "depthcap/diagnostics.hpp"

#include <cstdio>

namespace depthcap {

void warn_to_stderr(std::string_view message) {
  std::fprintf(stderr, "warning: %.*s\n", static_cast<int>(message.size()), message.data());
}

}  // namespace depthcap
