#pragma once

// Test-only helpers: sample builders and a fixture NLI server.

#include <atomic>
#include <chrono>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "gg/corpus.hpp"

namespace gg::testing {

inline Sample make_sample(std::string id, std::vector<std::string> docs, std::vector<std::string> claims,
                          bool answerable, DatasetTag tag = DatasetTag::asqa) {
  Sample s;
  s.id = std::move(id);
  s.question = "question for " + s.id;
  for (std::size_t i = 0; i < docs.size(); ++i)
    s.documents.push_back({static_cast<int>(i) + 1, "doc " + std::to_string(i + 1), docs[i]});
  for (auto& c : claims) s.gold_claims.push_back({c, std::nullopt});
  s.answerable = answerable;
  s.dataset_tag = tag;
  return s;
}

inline std::string wrap(std::string_view think, std::string_view answer) {
  return "<think>" + std::string(think) + "</think>\n<answer>" + std::string(answer) + "</answer>";
}

/// Local HTTP server speaking the NLI wire protocol. The scorer maps
/// (premise, hypothesis) to the score to return.
class FixtureNli {
 public:
  using Scorer = std::function<double(const std::string&, const std::string&)>;

  explicit FixtureNli(Scorer scorer, std::chrono::milliseconds delay = std::chrono::milliseconds(0))
      : scorer_(std::move(scorer)), delay_(delay) {
    server_.Post("/v1/entail", [this](const httplib::Request& req, httplib::Response& res) {
      ++calls_;
      if (delay_.count() > 0) std::this_thread::sleep_for(delay_);
      auto j = nlohmann::json::parse(req.body);
      double s = scorer_(j.at("premise").get<std::string>(), j.at("hypothesis").get<std::string>());
      if (s < 0) {
        res.status = 500;
        res.set_content("boom", "text/plain");
        return;
      }
      res.set_content(nlohmann::json{{"score", s}}.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~FixtureNli() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int calls() const { return calls_; }

 private:
  Scorer scorer_;
  std::chrono::milliseconds delay_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> calls_{0};
};

/// A port that refuses connections (bound to an ephemeral port, then closed).
inline int unused_port() {
  int fd = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = 0;
  ::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr);
  socklen_t len = sizeof addr;
  ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
  ::close(fd);
  return ntohs(addr.sin_port);
}

}  // namespace gg::testing
