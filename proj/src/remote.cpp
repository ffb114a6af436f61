#include <chrono>
#include <cmath>

#include "eoagent/agents.hpp"
#include "eoagent/error.hpp"
#include "http_client.hpp"
#include "httplib.h"

using nlohmann::json;

namespace eoa {

namespace detail {

Url parse_url(const std::string& text) {
  Url url;
  const auto sep = text.find("://");
  if (sep == std::string::npos) throw Error(ErrorCode::invalid_config, "malformed URL '" + text + "'");
  url.scheme = text.substr(0, sep);
  std::string rest = text.substr(sep + 3);
  const auto slash = rest.find('/');
  if (slash != std::string::npos) {
    url.path = rest.substr(slash);
    rest = rest.substr(0, slash);
  }
  if (url.scheme == "inproc") {
    url.host = rest;
    url.port = 0;
  } else if (url.scheme == "http") {
    const auto colon = rest.rfind(':');
    url.host = rest.substr(0, colon);
    if (colon != std::string::npos) {
      try {
        std::size_t used = 0;
        url.port = std::stoi(rest.substr(colon + 1), &used);
        if (used != rest.size() - colon - 1) throw std::invalid_argument("port");
      } catch (const std::exception&) {
        throw Error(ErrorCode::invalid_config, "malformed port in URL '" + text + "'");
      }
    }
  } else {
    throw Error(ErrorCode::invalid_config, "unsupported URL scheme '" + url.scheme + "'");
  }
  if (url.host.empty()) throw Error(ErrorCode::invalid_config, "URL '" + text + "' has no host");
  return url;
}

HttpReply http_request(const Url& base, const std::string& method, const std::string& path,
                       const std::string& body, int timeout_ms) {
  httplib::Client client(base.host, base.port);
  const auto deadline = std::chrono::milliseconds(timeout_ms > 0 ? timeout_ms : 60000);
  client.set_connection_timeout(deadline);
  client.set_read_timeout(deadline);
  client.set_write_timeout(deadline);

  const std::string target = base.path + path;
  httplib::Result res = method == "GET" ? client.Get(target.empty() ? "/" : target)
                                        : client.Post(target.empty() ? "/" : target, body, "application/json");
  if (!res) {
    const auto err = res.error();
    const std::string what = base.host + ":" + std::to_string(base.port) + target + ": " + httplib::to_string(err);
    if (err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout) {
      throw Error(ErrorCode::timeout, what);
    }
    throw Error(ErrorCode::connection_failure, what);
  }
  return HttpReply{res->status, res->body};
}

}  // namespace detail

namespace {

json post_json(const std::string& endpoint, const json& body, int timeout_ms) {
  const auto url = detail::parse_url(endpoint);
  if (url.scheme != "http") throw Error(ErrorCode::invalid_config, "remote backends need an http:// endpoint");
  const auto reply = detail::http_request(url, "POST", "", body.dump(), timeout_ms);
  if (reply.status != 200) {
    throw Error(ErrorCode::remote_error, "HTTP " + std::to_string(reply.status) + ": " + reply.body);
  }
  try {
    return json::parse(reply.body);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::schema_violation, std::string("response is not JSON: ") + e.what());
  }
}

}  // namespace

RemoteReasoner::RemoteReasoner(std::string endpoint, int timeout_ms)
    : endpoint_(std::move(endpoint)), timeout_ms_(timeout_ms) {
  detail::parse_url(endpoint_);
}

ReasonerOutput RemoteReasoner::reason(AgentRole role, const json& evidence) const {
  const json request{{"schema_version", kMessageSchemaVersion},
                     {"role", std::string(to_string(role))},
                     {"evidence", evidence}};
  const json response = post_json(endpoint_, request, timeout_ms_);
  if (!response.is_object() || !response.contains("labels") || !response["labels"].is_object()) {
    throw Error(ErrorCode::schema_violation, "response lacks a labels object");
  }
  ReasonerOutput out;
  out.labels = response["labels"];
  out.reasoning = response.contains("reasoning") && response["reasoning"].is_string()
                      ? response["reasoning"].get<std::string>()
                      : std::string{};
  validate_reasoner_output(role, out);
  return out;
}

RemoteSegmenter::RemoteSegmenter(std::string endpoint, int timeout_ms)
    : endpoint_(std::move(endpoint)), timeout_ms_(timeout_ms) {
  detail::parse_url(endpoint_);
}

std::vector<std::uint8_t> RemoteSegmenter::segment(const SceneBundle& scene, const FeatureStack& features,
                                                   const TileWindow& window) const {
  json planes = json::object();
  for (std::size_t p = 0; p < features.names.size(); ++p) {
    json values = json::array();
    for (int y = window.y; y < window.y + window.height; ++y) {
      for (int x = window.x; x < window.x + window.width; ++x) {
        const float v = features.planes[p][static_cast<std::size_t>(y) * features.width + x];
        values.push_back(std::isnan(v) ? json(nullptr) : json(v));
      }
    }
    planes[features.names[p]] = std::move(values);
  }
  const json request{{"schema_version", kMessageSchemaVersion},
                     {"scene_id", scene.scene_id},
                     {"window", {{"x", window.x}, {"y", window.y}, {"width", window.width}, {"height", window.height}}},
                     {"features", std::move(planes)}};
  const json response = post_json(endpoint_, request, timeout_ms_);
  if (!response.is_object() || !response.contains("labels") || !response["labels"].is_array()) {
    throw Error(ErrorCode::schema_violation, "segmenter response lacks a labels array");
  }
  std::vector<std::uint8_t> labels;
  labels.reserve(response["labels"].size());
  for (const auto& v : response["labels"]) {
    if (!v.is_number_unsigned() || v.get<unsigned>() > 255u) {
      throw Error(ErrorCode::schema_violation, "segmenter label out of range: " + v.dump());
    }
    labels.push_back(static_cast<std::uint8_t>(v.get<unsigned>()));
  }
  return labels;
}

}  // namespace eoa
