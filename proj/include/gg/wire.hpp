#pragma once

// JSON forms of the engine's public types. Objects are nlohmann::json with
// std::map storage, so dump() yields sorted keys; doubles are printed in
// shortest round-trip form.

#include <string>

#include <nlohmann/json.hpp>

#include "gg/corpus.hpp"
#include "gg/grpo_group.hpp"
#include "gg/response_parser.hpp"
#include "gg/rewards.hpp"
#include "gg/trust_metrics.hpp"

namespace gg::wire {

using json = nlohmann::json;

inline constexpr const char* kEngineVersion = "gg-reward 1.0.0";

json to_json(const Sample& s);
/// Throws ContractError with a dotted field path (prefix prepended).
Sample sample_from_json(const json& j, const std::string& prefix = "");

json to_json(const ParsedResponse& p);
json to_json(const StatementReward& r);
json to_json(const RewardBreakdown& b);
json to_json(const MetricsReport& m);

struct RewardRequest {
  Stage stage = Stage::stage2;
  Sample sample;
  std::vector<std::string> candidates;
  bool want_process_reward = false;
};

struct RewardResponse {
  std::vector<double> rewards;
  std::vector<double> advantages;
  std::vector<RewardBreakdown> breakdowns;
  std::string engine_version = kEngineVersion;
};

/// Validates shape only; candidate-count rules are enforced by the caller.
RewardRequest request_from_json(const json& j);
json to_json(const RewardRequest& r);
json to_json(const RewardResponse& r);

/// Canonical text: sorted keys, compact separators, trailing newline.
std::string canonical(const json& j);

}  // namespace gg::wire
