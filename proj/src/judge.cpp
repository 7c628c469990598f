#include "gg/judge.hpp"

#include <cstdlib>
#include <functional>
#include <regex>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "gg/errors.hpp"
#include "gg/response_parser.hpp"
#include "gg/text.hpp"

namespace gg {

void JudgeConfig::apply_env() {
  if (const char* url = std::getenv("GG_NLI_URL"); url && *url) endpoint = url;
  if (const char* ms = std::getenv("GG_NLI_TIMEOUT_MS"); ms && *ms) {
    char* end = nullptr;
    long v = std::strtol(ms, &end, 10);
    if (end && *end == '\0' && v > 0) timeout = std::chrono::milliseconds(v);
  }
}

void JudgeConfig::validate() const {
  if (!(tau_nli >= 0.0 && tau_nli <= 1.0)) throw ContractError("tau_nli", "tau_nli must be in [0,1]");
  if (backend == JudgeBackend::service && (!endpoint || endpoint->empty()))
    throw ContractError("endpoint", "service judge requires an endpoint");
  if (max_in_flight == 0) throw ContractError("max_in_flight", "max_in_flight must be >= 1");
}

JudgeVerdict Judge::entails(std::string_view premise, std::string_view hypothesis) {
  if (text::is_blank(premise)) throw ContractError("premise", "entails: premise is empty");
  if (text::is_blank(hypothesis)) throw ContractError("hypothesis", "entails: hypothesis is empty");
  double s = score(premise, hypothesis);
  return {s, s >= tau_};
}

double OracleJudge::score(std::string_view premise, std::string_view hypothesis) {
  return text::contains_normalized(premise, hypothesis) ? 1.0 : 0.0;
}

namespace {

struct Endpoint {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing slash
};

Endpoint split_endpoint(const std::string& url) {
  static const std::regex re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw ContractError("endpoint", "invalid NLI endpoint URL: " + url);
  std::string prefix = m[2].matched ? m[2].str() : "";
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {m[1].str(), prefix};
}

}  // namespace

ServiceJudge::ServiceJudge(std::string endpoint, double tau_nli, std::chrono::milliseconds timeout,
                           std::size_t max_in_flight)
    : Judge(tau_nli),
      endpoint_(std::move(endpoint)),
      timeout_(timeout),
      slots_(static_cast<std::ptrdiff_t>(max_in_flight)) {
  split_endpoint(endpoint_);
}

double ServiceJudge::score(std::string_view premise, std::string_view hypothesis) {
  const auto started = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return static_cast<long>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                 std::chrono::steady_clock::now() - started)
                                 .count());
  };
  Endpoint ep = split_endpoint(endpoint_);
  nlohmann::json body = {{"premise", premise}, {"hypothesis", hypothesis}};

  slots_.acquire();
  httplib::Result res = [&] {
    httplib::Client client(ep.origin);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
    client.set_tcp_nodelay(true);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    return client.Post(ep.prefix + "/v1/entail", body.dump(), "application/json");
  }();
  slots_.release();

  if (!res) throw TransportError(endpoint_, elapsed(), "NLI request failed: " + httplib::to_string(res.error()));
  if (res->status != 200)
    throw TransportError(endpoint_, elapsed(), "NLI service returned HTTP " + std::to_string(res->status));
  nlohmann::json reply = nlohmann::json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.is_object() || !reply.contains("score") ||
      !reply["score"].is_number())
    throw TransportError(endpoint_, elapsed(), "NLI service reply lacks a numeric score");
  double s = reply["score"].get<double>();
  if (!(s >= 0.0 && s <= 1.0))
    throw TransportError(endpoint_, elapsed(), "NLI score outside [0,1]: " + std::to_string(s));
  return s;
}

CachingJudge::CachingJudge(std::unique_ptr<Judge> inner, std::size_t capacity)
    : Judge(inner->tau()), inner_(std::move(inner)), capacity_(capacity) {}

std::size_t CachingJudge::KeyHash::operator()(const Key& k) const {
  std::size_t h = std::hash<std::string>{}(k.premise);
  return h ^ (std::hash<std::string>{}(k.hypothesis) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t CachingJudge::hits() const {
  std::lock_guard lock(mu_);
  return hits_;
}

std::size_t CachingJudge::misses() const {
  std::lock_guard lock(mu_);
  return misses_;
}

double CachingJudge::score(std::string_view premise, std::string_view hypothesis) {
  Key key{std::string(premise), std::string(hypothesis)};
  {
    std::lock_guard lock(mu_);
    if (auto it = index_.find(key); it != index_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second);
      ++hits_;
      return it->second->second;
    }
    ++misses_;
  }
  // Scored outside the lock so service calls can overlap.
  double s = inner_->entails(premise, hypothesis).score;
  std::lock_guard lock(mu_);
  if (capacity_ == 0 || index_.count(key)) return s;
  lru_.emplace_front(key, s);
  index_.emplace(std::move(key), lru_.begin());
  if (index_.size() > capacity_) {
    index_.erase(lru_.back().first);
    lru_.pop_back();
  }
  return s;
}

std::unique_ptr<Judge> make_judge(const JudgeConfig& cfg) {
  cfg.validate();
  std::unique_ptr<Judge> base;
  if (cfg.backend == JudgeBackend::service)
    base = std::make_unique<ServiceJudge>(*cfg.endpoint, cfg.tau_nli, cfg.timeout, cfg.max_in_flight);
  else
    base = std::make_unique<OracleJudge>(cfg.tau_nli);
  if (cfg.cache_capacity == 0) return base;
  return std::make_unique<CachingJudge>(std::move(base), cfg.cache_capacity);
}

double refusal_score(std::string_view answer, std::string_view gold_refusal) {
  if (text::is_blank(gold_refusal)) throw ContractError("gold_refusal", "gold refusal is empty");
  if (text::is_blank(answer)) return 0.0;
  const std::string gold = text::normalize(gold_refusal);
  double best = 0.0;
  for (const Statement& s : segment_statements(answer))
    best = std::max(best, text::edit_similarity(text::normalize(s.text), gold));
  return best;
}

}  // namespace gg
