#include <doctest.h>

#include <fstream>
#include <future>
#include <sstream>

#include "gg/errors.hpp"
#include "gg/service.hpp"
#include "gg/text.hpp"
#include "support.hpp"

using namespace gg;
using gg::testing::FixtureNli;
using gg::testing::wrap;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fixture(const std::string& name) { return slurp(std::string(GG_FIXTURE_DIR) + "/" + name); }

// Runs a RewardService on a free port for the lifetime of the object.
struct LiveService {
  RewardService service;
  int port;
  std::thread thread;

  LiveService(ServiceConfig cfg, std::shared_ptr<Judge> judge)
      : service((cfg.port = 0, std::move(cfg)), std::move(judge)), port(service.bind()) {
    thread = std::thread([this] { service.run(); });
    httplib::Client probe("127.0.0.1", port);
    for (int i = 0; i < 200 && !probe.Get("/healthz"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  ~LiveService() {
    service.stop();
    thread.join();
  }
  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port);
    c.set_read_timeout(30, 0);
    return c;
  }
};

}  // namespace

TEST_CASE("healthz") {
  LiveService live({}, std::make_shared<OracleJudge>());
  auto res = live.client().Get("/healthz");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body == "{\"engine_version\":\"gg-reward 1.0.0\",\"status\":\"ok\"}\n");
}

TEST_CASE("reward endpoint matches the golden response") {
  LiveService live({}, std::make_shared<OracleJudge>());
  auto res = live.client().Post("/v1/reward", fixture("reward_request_8.json"), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->get_header_value("Content-Type") == "application/json");
  CHECK(res->body == fixture("reward_response_8.json"));
}

TEST_CASE("run_reward_request is the shared engine path") {
  OracleJudge judge;
  auto req = wire::request_from_json(wire::json::parse(fixture("reward_request_8.json")));
  CHECK(wire::canonical(wire::to_json(run_reward_request(req, judge, {}))) == fixture("reward_response_8.json"));

  req.candidates.resize(1);
  auto single = run_reward_request(req, judge, {});
  CHECK(single.rewards == std::vector<double>{4.5});
  CHECK(single.advantages == std::vector<double>{0.0});

  req.candidates.clear();
  CHECK_THROWS_AS(run_reward_request(req, judge, {}), ContractError);
}

TEST_CASE("contract errors are 400 with the offending field") {
  LiveService live({}, std::make_shared<OracleJudge>());
  auto c = live.client();
  auto body = wire::json::parse(fixture("reward_request_8.json"));

  SUBCASE("empty candidates") {
    body["candidates"] = wire::json::array();
    auto res = c.Post("/v1/reward", body.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(wire::json::parse(res->body)["field"] == "candidates");
  }
  SUBCASE("missing question") {
    body["sample"].erase("question");
    auto res = c.Post("/v1/reward", body.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(wire::json::parse(res->body)["field"] == "sample.question");
  }
  SUBCASE("stage1 on an unanswerable sample") {
    body["stage"] = "stage1";
    body["sample"]["answerable"] = false;
    body["sample"]["claims"] = wire::json::array();
    auto res = c.Post("/v1/reward", body.dump(), "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
  }
  SUBCASE("malformed JSON") {
    auto res = c.Post("/v1/reward", "{not json", "application/json");
    REQUIRE(res);
    CHECK(res->status == 400);
    CHECK(wire::json::parse(res->body).contains("error"));
  }
}

TEST_CASE("judge outage is 502") {
  FixtureNli nli([](const std::string&, const std::string&) { return -1.0; });
  LiveService live({}, std::make_shared<ServiceJudge>(nli.url(), 0.5, std::chrono::milliseconds(2000), 4));
  auto res = live.client().Post("/v1/reward", fixture("reward_request_8.json"), "application/json");
  REQUIRE(res);
  CHECK(res->status == 502);
  CHECK(wire::json::parse(res->body)["error"].get<std::string>().find("candidate") != std::string::npos);
}

TEST_CASE("fixture NLI service reproduces oracle rewards") {
  FixtureNli nli([](const std::string& p, const std::string& h) { return text::contains_normalized(p, h) ? 0.9 : 0.1; });
  auto judge = std::make_shared<ServiceJudge>(nli.url(), 0.5, std::chrono::milliseconds(5000), 8);
  LiveService live({}, judge);
  auto res = live.client().Post("/v1/reward", fixture("reward_request_8.json"), "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  auto got = wire::json::parse(res->body);
  auto want = wire::json::parse(fixture("reward_response_8.json"));
  CHECK(got["rewards"] == want["rewards"]);
  CHECK(nli.calls() > 0);
}

TEST_CASE("requests beyond the concurrency limit get 429") {
  FixtureNli slow([](const std::string& p, const std::string& h) { return text::contains_normalized(p, h) ? 1.0 : 0.0; },
                  std::chrono::milliseconds(150));
  ServiceConfig cfg;
  cfg.concurrency_limit = 1;
  LiveService live(cfg, std::make_shared<ServiceJudge>(slow.url(), 0.5, std::chrono::milliseconds(10000), 4));
  const std::string body = fixture("reward_request_8.json");
  std::vector<std::future<int>> results;
  for (int i = 0; i < 4; ++i)
    results.push_back(std::async(std::launch::async, [&] {
      auto res = live.client().Post("/v1/reward", body, "application/json");
      return res ? res->status : -1;
    }));
  int ok = 0, limited = 0;
  for (auto& f : results) {
    int s = f.get();
    ok += s == 200;
    limited += s == 429;
  }
  CHECK(ok >= 1);
  CHECK(limited >= 1);
  CHECK(ok + limited == 4);
}

TEST_CASE("concurrent identical requests return identical bytes") {
  ServiceConfig cfg;
  cfg.concurrency_limit = 16;
  LiveService live(cfg, std::make_shared<OracleJudge>());
  const std::string body = fixture("reward_request_8.json");
  std::vector<std::future<std::string>> results;
  for (int i = 0; i < 12; ++i)
    results.push_back(std::async(std::launch::async, [&] {
      auto res = live.client().Post("/v1/reward", body, "application/json");
      return res && res->status == 200 ? res->body : std::string("failed");
    }));
  const std::string golden = fixture("reward_response_8.json");
  for (auto& f : results) CHECK(f.get() == golden);
}

TEST_CASE("parse endpoint") {
  LiveService live({}, std::make_shared<OracleJudge>());
  auto c = live.client();
  const std::string raw = wrap("t", "Paris is big [1][2]. Rome too.");
  auto plain = c.Post("/v1/parse", raw, "text/plain");
  auto as_json = c.Post("/v1/parse", wire::json{{"raw", raw}}.dump(), "application/json");
  REQUIRE(plain);
  REQUIRE(as_json);
  CHECK(plain->status == 200);
  CHECK(plain->body == as_json->body);
  CHECK(plain->body == wire::canonical(wire::to_json(parse_response(raw))));
  auto j = wire::json::parse(plain->body);
  CHECK(j["format_ok"] == true);
  CHECK(j["statements"][0]["citations"] == wire::json::array({1, 2}));

  auto bad = c.Post("/v1/parse", "{\"text\":1}", "application/json");
  REQUIRE(bad);
  CHECK(bad->status == 400);
  CHECK(wire::json::parse(bad->body)["field"] == "raw");
}

TEST_CASE("unknown routes are 404") {
  LiveService live({}, std::make_shared<OracleJudge>());
  auto res = live.client().Get("/v1/nothing");
  REQUIRE(res);
  CHECK(res->status == 404);
}
