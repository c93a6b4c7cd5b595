#pragma once

#include <stdexcept>
#include <string>

namespace t2m {

// Base for all domain errors. kind() is the stable error name used in CLI
// output, HTTP responses and reports.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message) : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define T2M_DEFINE_ERROR(Name)                                                      \
  class Name : public ::t2m::Error {                                                \
   public:                                                                          \
    explicit Name(const std::string& message) : ::t2m::Error(#Name, message) {}     \
  }

}  // namespace t2m
