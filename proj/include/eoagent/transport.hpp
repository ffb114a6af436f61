#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "eoagent/agents.hpp"
#include "eoagent/scene_store.hpp"
#include "json.hpp"

namespace eoa {

struct NodeDescriptor {
  std::string node_id;
  AgentRole role = AgentRole::early_warning;
  std::string endpoint;  // "inproc://name" or "http://host:port"
  std::vector<BandId> capabilities;
};

// Bands a role needs from a scene.
std::vector<BandId> default_capabilities(AgentRole role);

void to_json(nlohmann::json& j, const NodeDescriptor& d);
void from_json(const nlohmann::json& j, NodeDescriptor& d);

// ---------------------------------------------------------------------------
// Scene references
// ---------------------------------------------------------------------------

// Messages carry scene references, never pixels. A reference is a manifest
// scene_id or a path confined to the dataset root. Resolved scenes are cached
// as immutable bundles.
class SceneResolver {
 public:
  explicit SceneResolver(std::filesystem::path dataset_root,
                         std::optional<DatasetManifest> manifest = std::nullopt);

  // Throws Error{unknown_scene} for unknown ids, missing paths and paths that
  // escape the dataset root.
  std::shared_ptr<const SceneBundle> resolve(const std::string& ref) const;

  // Registers an in-memory scene under its scene_id.
  void add(std::shared_ptr<const SceneBundle> scene);

  const std::filesystem::path& dataset_root() const noexcept { return root_; }
  const std::optional<DatasetManifest>& manifest() const noexcept { return manifest_; }

 private:
  std::filesystem::path root_;
  std::optional<DatasetManifest> manifest_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::shared_ptr<const SceneBundle>> cache_;
};

// ---------------------------------------------------------------------------
// Agent nodes
// ---------------------------------------------------------------------------

struct NodeRequest {
  std::string method = "POST";
  std::string path;
  nlohmann::json body;
};

struct NodeResponse {
  int status = 200;
  nlohmann::json body;
};

// Transport-agnostic request handler for one agent role:
//   GET  /health   -> {"role", "schema_version", "node_id", "status"}
//   POST /analyze  -> HypothesisReport / SpecialistReport   (body {"scene_ref"})
//   POST /decide   -> FinalAlert  (body {"hypothesis", "hypothesis_absent",
//                                        "specialist_reports"})
// Errors are {"code", "message", "node_id"} with a 4xx/5xx status.
class AgentNode {
 public:
  AgentNode(NodeDescriptor descriptor, AgentToolkit toolkit, std::shared_ptr<const SceneResolver> scenes);

  const NodeDescriptor& descriptor() const noexcept { return descriptor_; }
  NodeResponse handle(const NodeRequest& request) const;

 private:
  NodeResponse error(int status, std::string_view code, const std::string& message) const;
  NodeResponse analyze(const nlohmann::json& body) const;
  NodeResponse decide(const nlohmann::json& body) const;

  NodeDescriptor descriptor_;
  AgentToolkit toolkit_;
  std::shared_ptr<const SceneResolver> scenes_;
};

// ---------------------------------------------------------------------------
// Transports
// ---------------------------------------------------------------------------

class Transport {
 public:
  virtual ~Transport() = default;
  // Throws Error{timeout | connection_failure}; HTTP-level errors come back as
  // a NodeResponse with a non-2xx status.
  virtual NodeResponse send(const NodeDescriptor& target, const NodeRequest& request, int timeout_ms) = 0;
};

// Synchronous call: returns the body of a 2xx response, otherwise throws
// Error{remote_error} carrying the node's error payload.
nlohmann::json call_node(Transport& transport, const NodeDescriptor& target, const NodeRequest& request,
                         int timeout_ms);

struct SimNetConfig {
  double latency_ms = 0.0;  // fixed one-way latency
  double jitter_ms = 0.0;   // uniform extra delay in [0, jitter_ms)
  double drop_probability = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

void to_json(nlohmann::json& j, const SimNetConfig& c);
void from_json(const nlohmann::json& j, SimNetConfig& c);

// One leg pair of a simulated exchange, recorded in call order per link.
struct SimNetEvent {
  std::string link;
  double request_delay_ms = 0.0;
  double response_delay_ms = 0.0;
  bool dropped = false;
};

// In-process network: nodes are attached by endpoint and every message is
// delayed (and possibly dropped) using a per-link RNG derived from the seed,
// so a link's delay sequence is reproducible regardless of other traffic.
class SimNetwork final : public Transport {
 public:
  explicit SimNetwork(SimNetConfig config = {});

  void attach(std::shared_ptr<const AgentNode> node);
  void detach(const std::string& endpoint);

  NodeResponse send(const NodeDescriptor& target, const NodeRequest& request, int timeout_ms) override;

  std::vector<SimNetEvent> trace() const;

 private:
  struct Link {
    std::mutex mutex;
    std::mt19937_64 rng;
  };

  Link& link_for(const std::string& endpoint);

  SimNetConfig config_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<const AgentNode>> nodes_;
  std::map<std::string, std::unique_ptr<Link>> links_;
  std::vector<SimNetEvent> trace_;
};

class HttpTransport final : public Transport {
 public:
  NodeResponse send(const NodeDescriptor& target, const NodeRequest& request, int timeout_ms) override;
};

// Dispatches on the endpoint scheme: inproc:// to the SimNetwork, http:// over
// the network.
class RoutingTransport final : public Transport {
 public:
  RoutingTransport(std::shared_ptr<SimNetwork> inproc, std::shared_ptr<HttpTransport> http);

  NodeResponse send(const NodeDescriptor& target, const NodeRequest& request, int timeout_ms) override;

 private:
  std::shared_ptr<SimNetwork> inproc_;
  std::shared_ptr<HttpTransport> http_;
};

// Serves one AgentNode over HTTP on a background thread.
class HttpNodeServer {
 public:
  // port 0 binds an ephemeral port. Throws Error{bind_failure}.
  HttpNodeServer(std::shared_ptr<const AgentNode> node, const std::string& host, int port);
  ~HttpNodeServer();

  HttpNodeServer(const HttpNodeServer&) = delete;
  HttpNodeServer& operator=(const HttpNodeServer&) = delete;

  int port() const noexcept { return port_; }
  std::string url() const;
  // Blocks until stop() is called from another thread or a signal handler.
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::string host_;
  int port_ = 0;
};

}  // namespace eoa
