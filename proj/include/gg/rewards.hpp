#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gg/corpus.hpp"
#include "gg/judge.hpp"
#include "gg/response_parser.hpp"

namespace gg {

enum class Stage { stage1, stage2 };

std::string_view to_string(Stage s);
std::optional<Stage> parse_stage(std::string_view s);

enum class CitationStatus { correct, incorrect, not_applicable };

std::string_view to_string(CitationStatus s);

struct StatementReward {
  int statement_index = 0;
  bool has_em = false;
  double r_em = 0.0;
  CitationStatus citation_status = CitationStatus::not_applicable;
  double r_citation = 0.0;

  bool operator==(const StatementReward&) const = default;
};

struct RewardBreakdown {
  double r_tag_count = 0.0;
  double r_format = 0.0;
  double r_em_total = 0.0;
  double r_citation_total = 0.0;
  double r_refusal = 0.0;  // amount added to total; 0 when its branch did not fire
  std::optional<double> r_process;
  double r_score = 0.0;
  double total = 0.0;
  std::vector<StatementReward> statement_rewards;
  Stage stage = Stage::stage2;

  bool operator==(const RewardBreakdown&) const = default;
};

enum class MatchMode {
  normalized,  // normalized substring (default)
  strict,      // raw byte substring, no folding
};

struct RewardOptions {
  double refusal_threshold = 0.85;
  MatchMode match_mode = MatchMode::normalized;
  /// Divide EM and citation sums by the statement count.
  bool mean_normalize = false;
  bool want_process_reward = false;
  /// Replaces refusal_score() when set; used by grid tests.
  std::function<double(std::string_view answer, std::string_view gold)> refusal_scorer;
};

/// Fraction of the four format tags that occur exactly once.
double tag_count_reward(const ParsedResponse& parsed);

StatementReward em_reward(const Statement& statement, const std::vector<GoldClaim>& gold_claims,
                          MatchMode mode = MatchMode::normalized);

/// Fills the citation fields of `reward`. Non-EM statements are not
/// applicable; EM statements need valid citations whose documents, joined in
/// citation order, entail the statement.
void citation_reward(StatementReward& reward, const Statement& statement,
                     const std::vector<Document>& documents, Judge& judge);

double refusal_reward(double r_score, bool answerable, double threshold = 0.85);

RewardBreakdown hierarchical_reward(const ParsedResponse& parsed, const Sample& sample, Stage stage,
                                    Judge& judge, const RewardOptions& options = {});

inline constexpr std::string_view kAnswerDecision =
    "The provided documents contain enough information to answer the question.";
inline constexpr std::string_view kRefusalDecision =
    "The provided documents do not contain enough information to answer the question.";

std::string_view decision_hypothesis(bool final_is_refusal);

/// Entailment score of the decision hypothesis given the reasoning trace.
double process_reward(std::string_view think, bool final_is_refusal, Judge& judge);

/// Cited documents' content joined in citation order; empty if any index is
/// out of range or there are no citations.
std::string cited_premise(const std::vector<int>& citations, const std::vector<Document>& documents);

}  // namespace gg
