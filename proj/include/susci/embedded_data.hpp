#pragma once

#include <string_view>

namespace susci::embedded {

// Contents of data/scales.json at build time.
std::string_view scales_json();
// Contents of data/result_schema.json at build time.
std::string_view result_schema_json();

}  // namespace susci::embedded
