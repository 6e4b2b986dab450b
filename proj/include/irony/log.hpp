#pragma once

#include <string_view>

namespace irony {

// Thin wrappers so translation units that include libtorch (which bundles its
// own fmt) can log without pulling in spdlog headers.
void log_info(std::string_view message);
void log_warn(std::string_view message);
void set_log_quiet(bool quiet);

}  // namespace irony
