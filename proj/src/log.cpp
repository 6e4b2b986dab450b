#include "irony/log.hpp"

#include <spdlog/spdlog.h>

namespace irony {

void log_info(std::string_view message) { spdlog::info("{}", message); }

void log_warn(std::string_view message) { spdlog::warn("{}", message); }

void set_log_quiet(bool quiet) { spdlog::set_level(quiet ? spdlog::level::warn : spdlog::level::info); }

}  // namespace irony
