#include "ssmri/log.hpp"

#include <cstdio>

namespace ssmri {

void log_warn(const std::string& msg) {
  std::fprintf(stderr, "[ssmri] warning: %s\n", msg.c_str());
}

void log_info(const std::string& msg) {
  std::fprintf(stderr, "[ssmri] %s\n", msg.c_str());
}

}  // namespace ssmri
