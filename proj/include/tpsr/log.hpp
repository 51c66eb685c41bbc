#pragma once

#include <string>

// Thin logging facade. spdlog lives behind it in its own translation unit
// because libtorch ships an fmt release that is incompatible with the
// system spdlog; nothing that includes torch may include spdlog directly.
namespace tpsr::log {

// trace, debug, info, warn, error, critical or off. Logs go to stderr.
void set_level(const std::string& level);

void debug(const std::string& message);
void info(const std::string& message);
void warn(const std::string& message);
void error(const std::string& message);

}  // namespace tpsr::log
