#include <atomic>
#include <thread>

#include "eoagent/error.hpp"
#include "eoagent/transport.hpp"
#include "httplib.h"

using nlohmann::json;

namespace eoa {

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::schema_violation:
    case ErrorCode::invalid_argument:
    case ErrorCode::invalid_value: return 400;
    case ErrorCode::unknown_scene: return 404;
    case ErrorCode::missing_band:
    case ErrorCode::missing_metadata:
    case ErrorCode::band_size_mismatch:
    case ErrorCode::truncated_band_file:
    case ErrorCode::unknown_band_id: return 422;
    case ErrorCode::timeout: return 504;
    case ErrorCode::backend_failure: return 502;
    default: return 500;
  }
}

}  // namespace

AgentNode::AgentNode(NodeDescriptor descriptor, AgentToolkit toolkit, std::shared_ptr<const SceneResolver> scenes)
    : descriptor_(std::move(descriptor)), toolkit_(std::move(toolkit)), scenes_(std::move(scenes)) {
  if (descriptor_.node_id.empty()) throw Error(ErrorCode::invalid_config, "node_id must not be empty");
  if (!scenes_ && descriptor_.role != AgentRole::decision) {
    throw Error(ErrorCode::invalid_config, "node " + descriptor_.node_id + " needs a scene resolver");
  }
}

NodeResponse AgentNode::error(int status, std::string_view code, const std::string& message) const {
  return NodeResponse{status, json{{"code", std::string(code)}, {"message", message}, {"node_id", descriptor_.node_id}}};
}

NodeResponse AgentNode::handle(const NodeRequest& request) const {
  try {
    if (request.path == "/health") {
      if (request.method != "GET") return error(405, "method-not-allowed", "use GET /health");
      return NodeResponse{200, json{{"role", std::string(to_string(descriptor_.role))},
                                    {"schema_version", kMessageSchemaVersion},
                                    {"node_id", descriptor_.node_id},
                                    {"status", "ok"}}};
    }
    const bool decides = descriptor_.role == AgentRole::decision;
    if (request.path == (decides ? "/decide" : "/analyze")) {
      if (request.method != "POST") return error(405, "method-not-allowed", "use POST " + request.path);
      if (!request.body.is_object()) return error(400, "schema-violation", "request body must be a JSON object");
      return decides ? decide(request.body) : analyze(request.body);
    }
    if (request.path == "/analyze" || request.path == "/decide") {
      return error(404, "wrong-role", request.path + " is not served by a " +
                                          std::string(to_string(descriptor_.role)) + " node");
    }
    return error(404, "not-found", "no route for " + request.method + " " + request.path);
  } catch (const Error& e) {
    return error(status_for(e.code()), to_string(e.code()), e.what());
  } catch (const json::exception& e) {
    return error(400, "schema-violation", e.what());
  } catch (const std::exception& e) {
    return error(500, "internal", e.what());
  }
}

NodeResponse AgentNode::analyze(const json& body) const {
  const auto ref = body.find("scene_ref");
  if (ref == body.end() || !ref->is_string()) {
    return error(400, "schema-violation", "request body needs a string field 'scene_ref'");
  }
  const auto scene = scenes_->resolve(ref->get<std::string>());
  for (BandId b : descriptor_.capabilities) {
    if (!scene->has_band(b)) {
      return error(422, "missing-band", "scene '" + scene->scene_id + "' lacks band " + std::string(band_name(b)));
    }
  }
  switch (descriptor_.role) {
    case AgentRole::early_warning: return NodeResponse{200, json(early_warning_assess(*scene, toolkit_))};
    case AgentRole::wildfire_specialist:
      return NodeResponse{200, json(wildfire_specialist_analyze(*scene, toolkit_))};
    case AgentRole::flood_specialist: return NodeResponse{200, json(flood_specialist_analyze(*scene, toolkit_))};
    case AgentRole::decision: break;
  }
  return error(500, "internal", "unreachable role");
}

NodeResponse AgentNode::decide(const json& body) const {
  std::optional<HypothesisReport> hypothesis;
  const bool absent = body.value("hypothesis_absent", false);
  const auto hyp = body.find("hypothesis");
  if (!absent) {
    if (hyp == body.end() || hyp->is_null()) {
      return error(400, "schema-violation", "'hypothesis' is required unless hypothesis_absent is true");
    }
    hypothesis = hyp->get<HypothesisReport>();
  } else if (hyp != body.end() && !hyp->is_null()) {
    return error(400, "schema-violation", "'hypothesis' must be null when hypothesis_absent is true");
  }
  const auto reports = body.find("specialist_reports");
  if (reports == body.end() || !reports->is_array()) {
    return error(400, "schema-violation", "request body needs an array 'specialist_reports'");
  }
  std::vector<SpecialistReport> parsed;
  for (const auto& r : *reports) parsed.push_back(r.get<SpecialistReport>());
  return NodeResponse{200, json(decision_fuse(hypothesis, parsed, toolkit_))};
}

// ---------------------------------------------------------------------------
// HTTP server
// ---------------------------------------------------------------------------

struct HttpNodeServer::Impl {
  std::shared_ptr<const AgentNode> node;
  httplib::Server server;
  std::thread thread;
};

HttpNodeServer::HttpNodeServer(std::shared_ptr<const AgentNode> node, const std::string& host, int port)
    : impl_(std::make_unique<Impl>()), host_(host) {
  impl_->node = std::move(node);
  auto serve = [node = impl_->node](const httplib::Request& req, httplib::Response& res) {
    NodeRequest request{req.method, req.path, json::object()};
    NodeResponse response;
    if (!req.body.empty()) {
      try {
        request.body = json::parse(req.body);
      } catch (const json::exception& e) {
        response = NodeResponse{400, json{{"code", "schema-violation"},
                                          {"message", std::string("body is not JSON: ") + e.what()},
                                          {"node_id", node->descriptor().node_id}}};
        res.status = response.status;
        res.set_content(response.body.dump(), "application/json");
        return;
      }
    }
    response = node->handle(request);
    res.status = response.status;
    res.set_content(response.body.dump(), "application/json");
  };
  impl_->server.Get(R"(/.*)", serve);
  impl_->server.Post(R"(/.*)", serve);
  // Exclusive port ownership: a second node on the same port must fail to bind.
  impl_->server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });

  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host);
    if (port_ < 0) throw Error(ErrorCode::bind_failure, "cannot bind " + host + " on an ephemeral port");
  } else {
    if (!impl_->server.bind_to_port(host, port)) {
      throw Error(ErrorCode::bind_failure, "cannot bind " + host + ":" + std::to_string(port));
    }
    port_ = port;
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

HttpNodeServer::~HttpNodeServer() {
  stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::string HttpNodeServer::url() const { return "http://" + host_ + ":" + std::to_string(port_); }

void HttpNodeServer::wait() {
  if (impl_->thread.joinable()) impl_->thread.join();
}

void HttpNodeServer::stop() { impl_->server.stop(); }

}  // namespace eoa
