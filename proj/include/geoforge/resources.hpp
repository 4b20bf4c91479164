#pragma once

#include <string_view>

namespace geoforge {

/// Text files compiled in from resources/ (e.g. "rules.txt",
/// "prompts/judge.txt"). Returns an empty view for unknown names.
std::string_view embedded_resource(std::string_view name);

}  // namespace geoforge
