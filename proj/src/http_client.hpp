#pragma once

// Internal HTTP helpers shared by the remote backends and the HTTP transport.

#include <string>

namespace eoa::detail {

struct Url {
  std::string scheme;
  std::string host;
  int port = 80;
  std::string path;  // includes the leading '/', "" when absent
};

// Accepts http://host[:port][/path] and inproc://name. Throws Error{invalid_config}.
Url parse_url(const std::string& text);

struct HttpReply {
  int status = 0;
  std::string body;
};

// Synchronous request with connect/read/write deadlines of timeout_ms.
// Throws Error{timeout} or Error{connection_failure}; any HTTP status is
// returned to the caller.
HttpReply http_request(const Url& base, const std::string& method, const std::string& path,
                       const std::string& body, int timeout_ms);

}  // namespace eoa::detail
