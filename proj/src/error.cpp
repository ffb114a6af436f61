#include "eoagent/error.hpp"

namespace eoa {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::missing_metadata: return "missing-metadata";
    case ErrorCode::band_size_mismatch: return "band-size-mismatch";
    case ErrorCode::truncated_band_file: return "truncated-band-file";
    case ErrorCode::unknown_band_id: return "unknown-band-id";
    case ErrorCode::invalid_value: return "invalid-value";
    case ErrorCode::io_failure: return "io-failure";
    case ErrorCode::invalid_spec: return "invalid-spec";
    case ErrorCode::missing_band: return "missing-band";
    case ErrorCode::invalid_config: return "invalid-config";
    case ErrorCode::invalid_stride: return "invalid-stride";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
    case ErrorCode::backend_failure: return "backend-failure";
    case ErrorCode::timeout: return "timeout";
    case ErrorCode::connection_failure: return "connection-failure";
    case ErrorCode::remote_error: return "remote-error";
    case ErrorCode::schema_violation: return "schema-violation";
    case ErrorCode::unknown_scene: return "unknown-scene";
    case ErrorCode::bind_failure: return "bind-failure";
    case ErrorCode::scene_set_mismatch: return "scene-set-mismatch";
    case ErrorCode::zero_routed_time: return "zero-routed-time";
    case ErrorCode::insufficient_samples: return "insufficient-samples";
    case ErrorCode::stage_failure: return "stage-failure";
    case ErrorCode::internal: return "internal";
  }
  return "internal";
}

}  // namespace eoa
