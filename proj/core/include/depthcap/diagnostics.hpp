#pragma once

#include <functional>
#include <string_view>

namespace depthcap {

// Receives non-fatal warnings (duplicate table rows, OOV substitutions, ...).
using WarningSink = std::function<void(std::string_view)>;

// Writes "warning: <msg>" to stderr.
void warn_to_stderr(std::string_view message);

}  // namespace depthcap
