#pragma once

#include <chrono>
#include <cstddef>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <unordered_map>

namespace gg {

struct JudgeVerdict {
  double score = 0.0;
  bool entailed = false;

  bool operator==(const JudgeVerdict&) const = default;
};

enum class JudgeBackend { service, oracle };

struct JudgeConfig {
  JudgeBackend backend = JudgeBackend::oracle;
  double tau_nli = 0.5;
  std::optional<std::string> endpoint;
  std::chrono::milliseconds timeout{10000};
  std::size_t cache_capacity = 65536;
  std::size_t max_in_flight = 16;

  /// GG_NLI_URL and GG_NLI_TIMEOUT_MS take precedence over file/flag values.
  void apply_env();
  void validate() const;
};

/// Entailment scorer. Implementations are thread-safe.
class Judge {
 public:
  explicit Judge(double tau_nli) : tau_(tau_nli) {}
  virtual ~Judge() = default;

  /// Throws ContractError on blank input, TransportError on backend failure.
  JudgeVerdict entails(std::string_view premise, std::string_view hypothesis);

  double tau() const { return tau_; }

 protected:
  virtual double score(std::string_view premise, std::string_view hypothesis) = 0;

 private:
  double tau_;
};

/// Deterministic stand-in: 1.0 iff the normalized hypothesis occurs inside
/// the normalized premise.
class OracleJudge final : public Judge {
 public:
  explicit OracleJudge(double tau_nli = 0.5) : Judge(tau_nli) {}

 protected:
  double score(std::string_view premise, std::string_view hypothesis) override;
};

/// POST {endpoint}/v1/entail {"premise","hypothesis"} -> {"score"}.
class ServiceJudge final : public Judge {
 public:
  ServiceJudge(std::string endpoint, double tau_nli, std::chrono::milliseconds timeout,
               std::size_t max_in_flight);

  const std::string& endpoint() const { return endpoint_; }

 protected:
  double score(std::string_view premise, std::string_view hypothesis) override;

 private:
  std::string endpoint_;
  std::chrono::milliseconds timeout_;
  std::counting_semaphore<> slots_;
};

/// LRU memo over another judge's scores, keyed by (premise, hypothesis).
class CachingJudge final : public Judge {
 public:
  CachingJudge(std::unique_ptr<Judge> inner, std::size_t capacity);

  std::size_t hits() const;
  std::size_t misses() const;

 protected:
  double score(std::string_view premise, std::string_view hypothesis) override;

 private:
  struct Key {
    std::string premise, hypothesis;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const;
  };
  using Entry = std::pair<Key, double>;

  std::unique_ptr<Judge> inner_;
  std::size_t capacity_;
  mutable std::mutex mu_;
  std::list<Entry> lru_;
  std::unordered_map<Key, std::list<Entry>::iterator, KeyHash> index_;
  std::size_t hits_ = 0, misses_ = 0;
};

/// Builds the configured backend wrapped in a cache (capacity 0 disables it).
std::unique_ptr<Judge> make_judge(const JudgeConfig& cfg);

/// Refusal similarity r_score: the best normalized edit similarity between
/// any sentence of the answer and the gold refusal. Empty answer -> 0.
double refusal_score(std::string_view answer, std::string_view gold_refusal);

}  // namespace gg
