#include "tpsr/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace tpsr::log {
namespace {

spdlog::logger& logger() {
  static const auto instance = [] {
    auto l = spdlog::get("tpsr");
    return l ? l : spdlog::stderr_color_mt("tpsr");
  }();
  return *instance;
}

}  // namespace

void set_level(const std::string& level) { logger().set_level(spdlog::level::from_str(level)); }

void debug(const std::string& message) { logger().debug(message); }
void info(const std::string& message) { logger().info(message); }
void warn(const std::string& message) { logger().warn(message); }
void error(const std::string& message) { logger().error(message); }

}  // namespace tpsr::log
