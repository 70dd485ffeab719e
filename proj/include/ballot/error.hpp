#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ballot {

// Failure categories. The CLI prints the category name as the machine-readable
// error code, so names are part of the command-line contract.
enum class Errc {
  shape,
  parameter,
  config,
  lookup,
  io,
  format,
  duplicate_id,
  malformed_row,
  undefined_similarity,
  undefined_rho,
  empty_input,
  stratification,
  version,
  corrupt,
  usage,
};

constexpr std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::shape:
      return "shape";
    case Errc::parameter:
      return "parameter";
    case Errc::config:
      return "config";
    case Errc::lookup:
      return "lookup";
    case Errc::io:
      return "io";
    case Errc::format:
      return "format";
    case Errc::duplicate_id:
      return "duplicate-id";
    case Errc::malformed_row:
      return "malformed-row";
    case Errc::undefined_similarity:
      return "undefined-similarity";
    case Errc::undefined_rho:
      return "undefined-rho";
    case Errc::empty_input:
      return "empty-input";
    case Errc::stratification:
      return "stratification";
    case Errc::version:
      return "version";
    case Errc::corrupt:
      return "corrupt";
    case Errc::usage:
      return "usage";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message) : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// Writes "warning: <message>" to stderr unless warnings are silenced.
void warn(std::string_view message);
void set_warnings_enabled(bool enabled);

}  // namespace ballot
