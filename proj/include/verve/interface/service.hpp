#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "verve/interface/pipeline.hpp"

namespace verve::interface {

struct HttpReply {
  int status = 200;
  nlohmann::json body;
};

// Transport-independent handlers. Error bodies are {code, message, field?}.
HttpReply handle_rewrite(const Pipeline& pipeline, std::string_view body);
HttpReply handle_score(const Pipeline& pipeline, std::string_view body);
HttpReply handle_health(const Pipeline& pipeline);

// HTTP front end: POST /v1/rewrite, POST /v1/score, GET /healthz.
class Service {
 public:
  using AccessLog = std::function<void(const std::string&)>;

  Service(const Pipeline& pipeline, std::size_t workers, AccessLog log = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Port 0 picks a free port. Returns the bound port, or -1 on failure.
  int bind(const std::string& host, int port);
  // Blocks until stop().
  bool serve();
  void stop();
  bool running() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace verve::interface
