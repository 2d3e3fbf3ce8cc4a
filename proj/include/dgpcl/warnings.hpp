#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace dgpcl {

// Warnings go to stderr; tests may install a capture sink instead.
inline thread_local std::vector<std::string>* warning_capture = nullptr;

inline void warn(const std::string& msg) {
  if (warning_capture) {
    warning_capture->push_back(msg);
    return;
  }
  std::cerr << "warning: " << msg << '\n';
}

struct WarningCaptureGuard {
  std::vector<std::string> messages;
  std::vector<std::string>* previous;
  WarningCaptureGuard() : previous(warning_capture) { warning_capture = &messages; }
  ~WarningCaptureGuard() { warning_capture = previous; }
  WarningCaptureGuard(const WarningCaptureGuard&) = delete;
  WarningCaptureGuard& operator=(const WarningCaptureGuard&) = delete;
};

}  // namespace dgpcl
