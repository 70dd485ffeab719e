#include "ballot/error.hpp"

#include <iostream>

namespace ballot {

namespace {
bool g_warnings_enabled = true;
}

void warn(std::string_view message) {
  if (g_warnings_enabled) std::cerr << "warning: " << message << '\n';
}

void set_warnings_enabled(bool enabled) { g_warnings_enabled = enabled; }

}  // namespace ballot
