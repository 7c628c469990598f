#include "gg/service.hpp"

#include <stdexcept>

#include <httplib.h>

#include "gg/errors.hpp"

namespace gg {

wire::RewardResponse run_reward_request(const wire::RewardRequest& request, Judge& judge,
                                        const EngineOptions& options) {
  GroupOptions g;
  g.reward.refusal_threshold = options.refusal_threshold;
  g.reward.match_mode = options.match_mode;
  g.reward.want_process_reward = request.want_process_reward;
  g.epsilon = options.epsilon;
  g.parallelism = options.parallelism;

  wire::RewardResponse response;
  if (request.candidates.size() == 1) {
    response.breakdowns = score_candidates(request.sample, request.candidates, request.stage, judge, g);
    response.rewards = {response.breakdowns.front().total};
    response.advantages = {0.0};
    return response;
  }
  ScoredGroup scored = score_group(request.sample, request.candidates, request.stage, judge, g);
  response.breakdowns = std::move(scored.breakdowns);
  response.rewards = std::move(scored.group.rewards);
  response.advantages = std::move(scored.group.advantages);
  return response;
}

namespace {

void send_json(httplib::Response& res, int status, const wire::json& body) {
  res.status = status;
  res.set_content(wire::canonical(body), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message, const std::string& field = "") {
  wire::json body = {{"error", message}, {"engine_version", wire::kEngineVersion}};
  if (!field.empty()) body["field"] = field;
  send_json(res, status, body);
}

class InFlightGuard {
 public:
  InFlightGuard(std::atomic<std::size_t>& counter, std::size_t limit) : counter_(counter) {
    admitted_ = counter_.fetch_add(1) < limit;
  }
  ~InFlightGuard() { counter_.fetch_sub(1); }
  bool admitted() const { return admitted_; }

 private:
  std::atomic<std::size_t>& counter_;
  bool admitted_;
};

}  // namespace

RewardService::RewardService(ServiceConfig config, std::shared_ptr<Judge> judge)
    : config_(std::move(config)), judge_(std::move(judge)), server_(std::make_unique<httplib::Server>()) {
  if (config_.concurrency_limit == 0) throw ContractError("concurrency_limit", "concurrency limit must be >= 1");
  // Extra workers let over-limit requests be answered with 429 instead of queueing.
  const std::size_t workers = config_.concurrency_limit + 4;
  server_->set_tcp_nodelay(true);
  server_->new_task_queue = [workers] { return new httplib::ThreadPool(workers); };
  install_routes();
}

RewardService::~RewardService() { stop(); }

void RewardService::install_routes() {
  server_->Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}, {"engine_version", wire::kEngineVersion}});
  });

  server_->Post("/v1/parse", [this](const httplib::Request& req, httplib::Response& res) {
    InFlightGuard guard(in_flight_, config_.concurrency_limit);
    if (!guard.admitted()) return send_error(res, 429, "too many concurrent requests");
    std::string raw = req.body;
    if (req.get_header_value("Content-Type").find("application/json") != std::string::npos) {
      wire::json j = wire::json::parse(req.body, nullptr, false);
      if (j.is_discarded() || !j.is_object()) return send_error(res, 400, "body is not a JSON object");
      if (!j.contains("raw") || !j["raw"].is_string()) return send_error(res, 400, "missing field raw", "raw");
      raw = j["raw"].get<std::string>();
    }
    send_json(res, 200, wire::to_json(parse_response(raw)));
  });

  server_->Post("/v1/reward", [this](const httplib::Request& req, httplib::Response& res) {
    InFlightGuard guard(in_flight_, config_.concurrency_limit);
    if (!guard.admitted()) return send_error(res, 429, "too many concurrent requests");
    wire::json body = wire::json::parse(req.body, nullptr, false);
    if (body.is_discarded()) return send_error(res, 400, "body is not valid JSON");
    try {
      wire::RewardRequest request = wire::request_from_json(body);
      send_json(res, 200, wire::to_json(run_reward_request(request, *judge_, config_.engine)));
    } catch (const ContractError& e) {
      send_error(res, 400, e.what(), e.field());
    } catch (const TransportError& e) {
      send_error(res, 502, e.what());
    }
  });

  server_->set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    } catch (...) {
      send_error(res, 500, "unknown error");
    }
  });
}

int RewardService::bind() {
  int port = config_.port == 0 ? server_->bind_to_any_port(config_.host)
                               : (server_->bind_to_port(config_.host, config_.port) ? config_.port : -1);
  if (port < 0)
    throw std::runtime_error("cannot bind " + config_.host + ":" + std::to_string(config_.port));
  config_.port = port;
  return port;
}

void RewardService::run() { server_->listen_after_bind(); }

void RewardService::stop() {
  if (server_) server_->stop();
}

bool RewardService::running() const { return server_->is_running(); }

}  // namespace gg
