#include "eoagent/transport.hpp"

#include <chrono>

#include "eoagent/error.hpp"
#include "http_client.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace eoa {

std::vector<BandId> default_capabilities(AgentRole role) {
  switch (role) {
    case AgentRole::early_warning: return {BandId::B2, BandId::B3, BandId::B4};
    case AgentRole::wildfire_specialist:
      return {BandId::B3, BandId::B4, BandId::B8, BandId::B11, BandId::B12};
    case AgentRole::flood_specialist: return {BandId::VV, BandId::VH};
    case AgentRole::decision: return {};
  }
  return {};
}

void to_json(json& j, const NodeDescriptor& d) {
  json caps = json::array();
  for (BandId b : d.capabilities) caps.push_back(std::string(band_name(b)));
  j = json{{"node_id", d.node_id},
           {"role", std::string(to_string(d.role))},
           {"endpoint", d.endpoint},
           {"capabilities", caps}};
}

void from_json(const json& j, NodeDescriptor& d) {
  try {
    NodeDescriptor out;
    out.node_id = j.at("node_id").get<std::string>();
    auto role = parse_agent_role(j.at("role").get<std::string>());
    if (!role) throw Error(ErrorCode::invalid_config, "unknown node role " + j.at("role").dump());
    out.role = *role;
    out.endpoint = j.at("endpoint").get<std::string>();
    detail::parse_url(out.endpoint);
    if (j.contains("capabilities")) {
      for (const auto& name : j["capabilities"]) {
        auto band = parse_band(name.get<std::string>());
        if (!band) throw Error(ErrorCode::invalid_config, "unknown band in capabilities: " + name.dump());
        out.capabilities.push_back(*band);
      }
    } else {
      out.capabilities = default_capabilities(out.role);
    }
    d = std::move(out);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_config, std::string("node descriptor: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// SceneResolver
// ---------------------------------------------------------------------------

SceneResolver::SceneResolver(fs::path dataset_root, std::optional<DatasetManifest> manifest)
    : root_(std::move(dataset_root)), manifest_(std::move(manifest)) {}

void SceneResolver::add(std::shared_ptr<const SceneBundle> scene) {
  std::lock_guard lock(mutex_);
  cache_[scene->scene_id] = std::move(scene);
}

std::shared_ptr<const SceneBundle> SceneResolver::resolve(const std::string& ref) const {
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(ref);
    if (it != cache_.end()) return it->second;
  }
  if (ref.empty()) throw Error(ErrorCode::unknown_scene, "empty scene reference");

  fs::path dir;
  if (const ManifestEntry* entry = manifest_ ? manifest_->find(ref) : nullptr) {
    dir = manifest_->resolve(*entry);
  } else {
    if (root_.empty()) throw Error(ErrorCode::unknown_scene, "unknown scene '" + ref + "'");
    const fs::path candidate = fs::path(ref).is_absolute() ? fs::path(ref) : root_ / ref;
    const fs::path root = fs::weakly_canonical(root_);
    const fs::path target = fs::weakly_canonical(candidate);
    const fs::path rel = target.lexically_relative(root);
    if (rel.empty() || *rel.begin() == "..") {
      throw Error(ErrorCode::unknown_scene, "scene reference '" + ref + "' escapes the dataset root");
    }
    if (!fs::exists(target / "meta.json")) {
      throw Error(ErrorCode::unknown_scene, "unknown scene '" + ref + "'");
    }
    dir = target;
  }

  auto scene = std::make_shared<const SceneBundle>(load_scene(dir));
  std::lock_guard lock(mutex_);
  return cache_.emplace(ref, std::move(scene)).first->second;
}

// ---------------------------------------------------------------------------
// Transports
// ---------------------------------------------------------------------------

json call_node(Transport& transport, const NodeDescriptor& target, const NodeRequest& request, int timeout_ms) {
  NodeResponse response = transport.send(target, request, timeout_ms);
  if (response.status >= 200 && response.status < 300) return std::move(response.body);
  throw Error(ErrorCode::remote_error, target.node_id + " answered HTTP " + std::to_string(response.status) +
                                           ": " + response.body.dump());
}

void SimNetConfig::validate() const {
  if (latency_ms < 0.0 || jitter_ms < 0.0) throw Error(ErrorCode::invalid_config, "latency must be >= 0");
  if (drop_probability < 0.0 || drop_probability > 1.0) {
    throw Error(ErrorCode::invalid_config, "drop_probability must lie in [0, 1]");
  }
}

void to_json(json& j, const SimNetConfig& c) {
  j = json{{"latency_ms", c.latency_ms},
           {"jitter_ms", c.jitter_ms},
           {"drop_probability", c.drop_probability},
           {"seed", c.seed}};
}

void from_json(const json& j, SimNetConfig& c) {
  SimNetConfig out;
  try {
    out.latency_ms = j.value("latency_ms", 0.0);
    out.jitter_ms = j.value("jitter_ms", 0.0);
    out.drop_probability = j.value("drop_probability", 0.0);
    out.seed = j.value("seed", std::uint64_t{0});
  } catch (const json::exception& e) {
    throw Error(ErrorCode::invalid_config, std::string("simnet config: ") + e.what());
  }
  out.validate();
  c = out;
}

namespace {

// FNV-1a, stable across platforms unlike std::hash.
std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

void sleep_ms(double ms) {
  if (ms > 0.0) std::this_thread::sleep_for(std::chrono::duration<double, std::milli>(ms));
}

json over_the_wire(const json& body) { return json::parse(body.dump()); }

}  // namespace

SimNetwork::SimNetwork(SimNetConfig config) : config_(config) { config_.validate(); }

void SimNetwork::attach(std::shared_ptr<const AgentNode> node) {
  std::lock_guard lock(mutex_);
  nodes_[node->descriptor().endpoint] = std::move(node);
}

void SimNetwork::detach(const std::string& endpoint) {
  std::lock_guard lock(mutex_);
  nodes_.erase(endpoint);
}

SimNetwork::Link& SimNetwork::link_for(const std::string& endpoint) {
  std::lock_guard lock(mutex_);
  auto& slot = links_[endpoint];
  if (!slot) {
    slot = std::make_unique<Link>();
    slot->rng.seed(config_.seed ^ fnv1a(endpoint));
  }
  return *slot;
}

std::vector<SimNetEvent> SimNetwork::trace() const {
  std::lock_guard lock(mutex_);
  return trace_;
}

NodeResponse SimNetwork::send(const NodeDescriptor& target, const NodeRequest& request, int timeout_ms) {
  std::shared_ptr<const AgentNode> node;
  {
    std::lock_guard lock(mutex_);
    auto it = nodes_.find(target.endpoint);
    if (it != nodes_.end()) node = it->second;
  }
  if (!node) throw Error(ErrorCode::connection_failure, "no node listening at " + target.endpoint);

  SimNetEvent event;
  event.link = target.endpoint;
  bool request_dropped = false;
  bool response_dropped = false;
  {
    Link& link = link_for(target.endpoint);
    std::lock_guard lock(link.mutex);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    // Four draws per exchange, always, so the sequence only depends on the
    // number of calls made on this link.
    request_dropped = unit(link.rng) < config_.drop_probability;
    event.request_delay_ms = config_.latency_ms + config_.jitter_ms * unit(link.rng);
    response_dropped = unit(link.rng) < config_.drop_probability;
    event.response_delay_ms = config_.latency_ms + config_.jitter_ms * unit(link.rng);
    event.dropped = request_dropped || response_dropped;
  }
  {
    std::lock_guard lock(mutex_);
    trace_.push_back(event);
  }

  const double budget = timeout_ms > 0 ? static_cast<double>(timeout_ms) : 1e12;
  auto timed_out = [&](const char* leg) {
    return Error(ErrorCode::timeout, target.node_id + ": " + leg + " lost or late on simulated link " +
                                         target.endpoint);
  };

  if (request_dropped || event.request_delay_ms >= budget) {
    sleep_ms(std::min(budget, 1e7));
    throw timed_out("request");
  }
  sleep_ms(event.request_delay_ms);
  const auto start = std::chrono::steady_clock::now();
  NodeResponse response = node->handle(NodeRequest{request.method, request.path, over_the_wire(request.body)});
  const double handled =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  const double remaining = budget - event.request_delay_ms - handled;
  if (response_dropped || event.response_delay_ms >= remaining) {
    sleep_ms(std::max(0.0, std::min(remaining, 1e7)));
    throw timed_out("response");
  }
  sleep_ms(event.response_delay_ms);
  response.body = over_the_wire(response.body);
  return response;
}

NodeResponse HttpTransport::send(const NodeDescriptor& target, const NodeRequest& request, int timeout_ms) {
  const auto url = detail::parse_url(target.endpoint);
  if (url.scheme != "http") throw Error(ErrorCode::invalid_config, "HTTP transport cannot reach " + target.endpoint);
  const auto reply = detail::http_request(url, request.method, request.path,
                                          request.method == "GET" ? std::string{} : request.body.dump(), timeout_ms);
  NodeResponse response;
  response.status = reply.status;
  try {
    response.body = reply.body.empty() ? json::object() : json::parse(reply.body);
  } catch (const json::exception&) {
    response.body = json{{"code", "schema-violation"}, {"message", reply.body}, {"node_id", target.node_id}};
    if (response.status < 400) response.status = 502;
  }
  return response;
}

RoutingTransport::RoutingTransport(std::shared_ptr<SimNetwork> inproc, std::shared_ptr<HttpTransport> http)
    : inproc_(std::move(inproc)), http_(std::move(http)) {}

NodeResponse RoutingTransport::send(const NodeDescriptor& target, const NodeRequest& request, int timeout_ms) {
  const auto url = detail::parse_url(target.endpoint);
  if (url.scheme == "inproc") {
    if (!inproc_) throw Error(ErrorCode::connection_failure, "no in-process network for " + target.endpoint);
    return inproc_->send(target, request, timeout_ms);
  }
  if (!http_) throw Error(ErrorCode::connection_failure, "no HTTP transport for " + target.endpoint);
  return http_->send(target, request, timeout_ms);
}

}  // namespace eoa
