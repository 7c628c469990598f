#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gg/corpus.hpp"
#include "gg/judge.hpp"
#include "gg/rewards.hpp"

namespace gg {

struct GroupScore {
  int group_size = 0;
  std::vector<double> rewards;
  std::vector<double> advantages;
  double mean = 0.0;
  double std = 0.0;  // population standard deviation
};

inline constexpr double kDefaultAdvantageEpsilon = 1e-4;

/// (r_i - mean) / (std + epsilon) with population std; a group with zero
/// spread gets all-zero advantages. Needs at least two finite rewards.
GroupScore group_advantages(std::span<const double> rewards,
                            double epsilon = kDefaultAdvantageEpsilon);

struct GroupOptions {
  RewardOptions reward;
  double epsilon = kDefaultAdvantageEpsilon;
  /// Worker threads for per-candidate scoring; 1 scores inline.
  unsigned parallelism = 1;
};

struct ScoredGroup {
  std::vector<RewardBreakdown> breakdowns;
  GroupScore group;
};

/// Parses and scores every candidate, then normalizes the totals. A judge
/// failure on any candidate aborts the whole group with a TransportError
/// naming that candidate.
ScoredGroup score_group(const Sample& sample, const std::vector<std::string>& candidates, Stage stage,
                        Judge& judge, const GroupOptions& options = {});

/// Scores candidates without normalization (any count >= 1).
std::vector<RewardBreakdown> score_candidates(const Sample& sample,
                                              const std::vector<std::string>& candidates,
                                              Stage stage, Judge& judge,
                                              const GroupOptions& options = {});

}  // namespace gg
