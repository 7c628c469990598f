#pragma once

#include <atomic>
#include <memory>
#include <string>

#include "gg/grpo_group.hpp"
#include "gg/judge.hpp"
#include "gg/wire.hpp"

namespace httplib {
class Server;
}

namespace gg {

struct EngineOptions {
  double refusal_threshold = 0.85;
  double epsilon = kDefaultAdvantageEpsilon;
  MatchMode match_mode = MatchMode::normalized;
  unsigned parallelism = 1;
};

/// Shared by the CLI and the HTTP service so both produce identical bytes.
/// One candidate is scored without normalization (advantage 0); two or more
/// form a group.
wire::RewardResponse run_reward_request(const wire::RewardRequest& request, Judge& judge,
                                        const EngineOptions& options);

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::size_t concurrency_limit = 8;
  EngineOptions engine;
};

/// HTTP front end: POST /v1/reward, POST /v1/parse, GET /healthz.
class RewardService {
 public:
  RewardService(ServiceConfig config, std::shared_ptr<Judge> judge);
  ~RewardService();

  RewardService(const RewardService&) = delete;
  RewardService& operator=(const RewardService&) = delete;

  /// Binds the socket; returns the bound port. Throws std::runtime_error.
  int bind();
  /// Serves until stop(); in-flight requests finish before it returns.
  void run();
  void stop();
  bool running() const;

 private:
  void install_routes();

  ServiceConfig config_;
  std::shared_ptr<Judge> judge_;
  std::unique_ptr<httplib::Server> server_;
  std::atomic<std::size_t> in_flight_{0};
};

}  // namespace gg
