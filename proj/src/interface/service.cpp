#include "verve/interface/service.hpp"

#include <chrono>
#include <sstream>

#include "httplib.h"
#include "verve/text/tokenize.hpp"

namespace verve::interface {

namespace {

HttpReply error(int status, std::string code, std::string message, std::string field = {}) {
  nlohmann::json body = {{"code", std::move(code)}, {"message", std::move(message)}};
  if (!field.empty()) body["field"] = std::move(field);
  return {status, std::move(body)};
}

// Parses the body and checks the required text fields; returns an error reply
// or std::nullopt with `out` filled.
std::optional<HttpReply> parse_pair(std::string_view body, nlohmann::json& out, std::string& prompt,
                                    std::string& response) {
  try {
    out = nlohmann::json::parse(body);
  } catch (const std::exception& e) {
    return error(400, "malformed_body", std::string("body is not valid JSON: ") + e.what());
  }
  if (!out.is_object()) return error(400, "malformed_body", "body must be a JSON object");
  for (const char* field : {"prompt", "response"}) {
    if (!out.contains(field)) return error(422, "missing_field", std::string(field) + " is required", field);
    if (!out.at(field).is_string()) return error(400, "malformed_body", std::string(field) + " must be a string", field);
    if (text::trim(out.at(field).get<std::string>()).empty())
      return error(422, "empty_field", std::string(field) + " must not be empty", field);
  }
  prompt = out.at("prompt").get<std::string>();
  response = out.at("response").get<std::string>();
  return std::nullopt;
}

std::optional<HttpReply> parse_options(const nlohmann::json& body, RewriteOptions& opt) {
  if (!body.contains("options") || body.at("options").is_null()) return std::nullopt;
  const auto& o = body.at("options");
  if (!o.is_object()) return error(400, "malformed_body", "options must be an object", "options");
  for (const auto& [key, value] : o.items()) {
    const std::string field = "options." + key;
    if (!value.is_number_unsigned())
      return error(422, "invalid_option", key + " must be a non-negative integer", field);
    const auto v = value.get<std::uint64_t>();
    if (key == "seed") {
      opt.seed = v;
    } else if (key == "max_attempts") {
      if (v < 1 || v > 10) return error(422, "invalid_option", "max_attempts must be in 1..10", field);
      opt.max_attempts = v;
    } else if (key == "beams") {
      if (v < 1 || v > 16) return error(422, "invalid_option", "beams must be in 1..16", field);
      opt.beams = v;
    } else {
      return error(422, "invalid_option", "unknown option " + key, field);
    }
  }
  return std::nullopt;
}

}  // namespace

HttpReply handle_rewrite(const Pipeline& pipeline, std::string_view body) {
  nlohmann::json j;
  std::string prompt, response;
  if (auto e = parse_pair(body, j, prompt, response)) return *e;
  RewriteOptions opt;
  if (auto e = parse_options(j, opt)) return *e;
  if (!pipeline.can_rewrite()) return error(503, "models_unavailable", "rewrite models are not loaded");
  try {
    const auto result = pipeline.rewrite(prompt, response, opt);
    return {200, {{"result", rewriter::to_json(result, pipeline.config().mask)},
                  {"seed", opt.seed.value_or(pipeline.config().seed)}}};
  } catch (const ServiceUnavailable& e) {
    return error(503, "models_unavailable", e.what());
  } catch (const std::invalid_argument& e) {
    return error(422, "invalid_input", e.what());
  } catch (const std::exception& e) {
    return error(500, "rewrite_failed", e.what());
  }
}

HttpReply handle_score(const Pipeline& pipeline, std::string_view body) {
  nlohmann::json j;
  std::string prompt, response;
  if (auto e = parse_pair(body, j, prompt, response)) return *e;
  if (!pipeline.can_score()) return error(503, "models_unavailable", "scoring models are not loaded");
  try {
    const auto pred = pipeline.classify(prompt, response);
    nlohmann::json probs;
    for (auto r : {corpus::Reflection::NR, corpus::Reflection::SR, corpus::Reflection::CR})
      probs[std::string(corpus::to_string(r))] = pred.probabilities[static_cast<std::size_t>(r)];
    return {200, {{"label", corpus::to_string(pred.label)},
                  {"probabilities", probs},
                  {"score", pipeline.score(prompt, response)},
                  {"truncated", pred.truncated}}};
  } catch (const ServiceUnavailable& e) {
    return error(503, "models_unavailable", e.what());
  } catch (const std::invalid_argument& e) {
    return error(422, "invalid_input", e.what());
  } catch (const std::exception& e) {
    return error(500, "score_failed", e.what());
  }
}

HttpReply handle_health(const Pipeline& pipeline) { return {200, pipeline.health()}; }

struct Service::Impl {
  const Pipeline& pipeline;
  httplib::Server server;
  AccessLog log;

  Impl(const Pipeline& p, std::size_t workers, AccessLog l) : pipeline(p), log(std::move(l)) {
    server.new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
    auto route = [this](auto handler) {
      return [this, handler](const httplib::Request& req, httplib::Response& res) {
        const auto t0 = std::chrono::steady_clock::now();
        const HttpReply r = handler(req);
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
        if (log) {
          std::ostringstream os;
          os << req.method << ' ' << req.path << ' ' << r.status << ' '
             << std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() << "ms";
          log(os.str());
        }
      };
    };
    server.Post("/v1/rewrite", route([this](const httplib::Request& req) { return handle_rewrite(pipeline, req.body); }));
    server.Post("/v1/score", route([this](const httplib::Request& req) { return handle_score(pipeline, req.body); }));
    server.Get("/healthz", route([this](const httplib::Request&) { return handle_health(pipeline); }));
  }
};

Service::Service(const Pipeline& pipeline, std::size_t workers, AccessLog log)
    : impl_(std::make_unique<Impl>(pipeline, workers, std::move(log))) {}

Service::~Service() { stop(); }

int Service::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool Service::serve() { return impl_->server.listen_after_bind(); }

void Service::stop() {
  if (impl_) impl_->server.stop();
}

bool Service::running() const { return impl_->server.is_running(); }

}  // namespace verve::interface
