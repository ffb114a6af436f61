#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace eoa {

enum class ErrorCode {
  invalid_argument,
  missing_metadata,
  band_size_mismatch,
  truncated_band_file,
  unknown_band_id,
  invalid_value,
  io_failure,
  invalid_spec,
  missing_band,
  invalid_config,
  invalid_stride,
  dimension_mismatch,
  backend_failure,
  timeout,
  connection_failure,
  remote_error,
  schema_violation,
  unknown_scene,
  bind_failure,
  scene_set_mismatch,
  zero_routed_time,
  insufficient_samples,
  stage_failure,
  internal,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure in the library surfaces as an Error carrying a machine-readable
// code; the message names the offending file, band, node or field.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace eoa
