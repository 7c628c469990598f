#include "gg/grpo_group.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>

#include "gg/errors.hpp"

namespace gg {

GroupScore group_advantages(std::span<const double> rewards, double epsilon) {
  if (rewards.size() < 2) throw ContractError("rewards", "group needs at least 2 rewards");
  if (!std::all_of(rewards.begin(), rewards.end(), [](double r) { return std::isfinite(r); }))
    throw ContractError("rewards", "group rewards must be finite");
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon))
    throw ContractError("epsilon", "epsilon must be finite and non-negative");

  GroupScore g;
  g.group_size = static_cast<int>(rewards.size());
  g.rewards.assign(rewards.begin(), rewards.end());
  const double n = static_cast<double>(rewards.size());
  double sum = 0.0;
  for (double r : rewards) sum += r;
  g.mean = sum / n;
  double sq = 0.0;
  for (double r : rewards) sq += (r - g.mean) * (r - g.mean);
  g.std = std::sqrt(sq / n);

  g.advantages.assign(rewards.size(), 0.0);
  if (g.std == 0.0) return g;
  for (std::size_t i = 0; i < rewards.size(); ++i)
    g.advantages[i] = (rewards[i] - g.mean) / (g.std + epsilon);
  return g;
}

std::vector<RewardBreakdown> score_candidates(const Sample& sample,
                                              const std::vector<std::string>& candidates,
                                              Stage stage, Judge& judge,
                                              const GroupOptions& options) {
  if (candidates.empty()) throw ContractError("candidates", "candidates must be non-empty");
  if (stage == Stage::stage1 && !sample.answerable)
    throw ContractError("sample.answerable", "stage1 rewards require an answerable sample (id " +
                                                 sample.id + ")");

  std::vector<RewardBreakdown> out(candidates.size());
  std::vector<std::exception_ptr> errors(candidates.size());
  auto score_one = [&](std::size_t i) {
    try {
      out[i] = hierarchical_reward(parse_response(candidates[i]), sample, stage, judge, options.reward);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  };

  const unsigned workers =
      std::min<unsigned>(std::max(1u, options.parallelism), static_cast<unsigned>(candidates.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < candidates.size(); ++i) score_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < candidates.size();) score_one(i);
      });
  }

  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!errors[i]) continue;
    try {
      std::rethrow_exception(errors[i]);
    } catch (const TransportError& e) {
      throw TransportError(e.endpoint(), e.elapsed_ms(),
                           "candidate " + std::to_string(i) + ": " + e.detail());
    }
  }
  return out;
}

ScoredGroup score_group(const Sample& sample, const std::vector<std::string>& candidates, Stage stage,
                        Judge& judge, const GroupOptions& options) {
  if (candidates.size() < 2)
    throw ContractError("candidates", "group scoring needs at least 2 candidates");
  ScoredGroup result;
  result.breakdowns = score_candidates(sample, candidates, stage, judge, options);
  std::vector<double> totals;
  totals.reserve(result.breakdowns.size());
  for (const RewardBreakdown& b : result.breakdowns) totals.push_back(b.total);
  result.group = group_advantages(totals, options.epsilon);
  return result;
}

}  // namespace gg
