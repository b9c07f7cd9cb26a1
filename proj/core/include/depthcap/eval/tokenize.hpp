#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace depthcap::eval {

// Caption tokenization shared by target alignment and the metrics:
// lowercase ASCII, delete ASCII characters that are neither alphanumeric nor
// whitespace, then split on whitespace. Bytes >= 0x80 are kept as-is.
std::vector<std::string> tokenize(std::string_view text);

// The surface form a single OCR token takes after tokenization (words joined
// by single spaces if it tokenizes to more than one).
std::string normalize_surface(std::string_view token);

std::string join_tokens(const std::vector<std::string>& tokens);

}  // namespace depthcap::eval
