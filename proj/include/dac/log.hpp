#pragma once

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace dac {

// verbosity from DAC_LOG: 0 silent (default), 1 decompositions, 2 synthesis loops
inline int log_level() {
  static const int level = [] {
    const char* v = std::getenv("DAC_LOG");
    return v ? std::atoi(v) : 0;
  }();
  return level;
}

inline void log_line(int level, const std::string& msg) {
  if (log_level() < level) return;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << "[dac] " << msg << "\n";
}

}  // namespace dac
