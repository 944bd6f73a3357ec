#pragma once

#include <string>

namespace ssmri {

void log_warn(const std::string& msg);
void log_info(const std::string& msg);

}  // namespace ssmri
