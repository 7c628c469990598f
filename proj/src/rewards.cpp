#include "gg/rewards.hpp"

#include <algorithm>

#include "gg/errors.hpp"
#include "gg/text.hpp"

namespace gg {

std::string_view to_string(Stage s) { return s == Stage::stage1 ? "stage1" : "stage2"; }

std::optional<Stage> parse_stage(std::string_view s) {
  if (s == "stage1") return Stage::stage1;
  if (s == "stage2") return Stage::stage2;
  return std::nullopt;
}

std::string_view to_string(CitationStatus s) {
  switch (s) {
    case CitationStatus::correct: return "correct";
    case CitationStatus::incorrect: return "incorrect";
    case CitationStatus::not_applicable: return "not_applicable";
  }
  return "not_applicable";
}

double tag_count_reward(const ParsedResponse& parsed) {
  int exact = 0;
  for (Tag t : kAllFormatTags)
    if (parsed.tag_counts[t] == 1) ++exact;
  return exact / 4.0;
}

StatementReward em_reward(const Statement& statement, const std::vector<GoldClaim>& gold_claims,
                          MatchMode mode) {
  StatementReward r;
  const std::string haystack =
      mode == MatchMode::normalized ? text::normalize(statement.text) : statement.text;
  for (const GoldClaim& claim : gold_claims) {
    const std::string needle =
        mode == MatchMode::normalized ? text::normalize(claim.claim_text) : claim.claim_text;
    if (!needle.empty() && haystack.find(needle) != std::string::npos) {
      r.has_em = true;
      break;
    }
  }
  r.r_em = r.has_em ? 0.5 : 0.0;
  return r;
}

std::string cited_premise(const std::vector<int>& citations, const std::vector<Document>& documents) {
  std::string premise;
  for (int c : citations) {
    if (c < 1 || static_cast<std::size_t>(c) > documents.size()) return {};
    if (!premise.empty()) premise += '\n';
    premise += documents[static_cast<std::size_t>(c) - 1].content;
  }
  return premise;
}

void citation_reward(StatementReward& reward, const Statement& statement,
                     const std::vector<Document>& documents, Judge& judge) {
  if (!reward.has_em) {
    reward.citation_status = CitationStatus::not_applicable;
    reward.r_citation = 0.0;
    return;
  }
  std::string premise = cited_premise(statement.citations, documents);
  bool supported = !text::is_blank(premise) && !text::is_blank(statement.text) &&
                   judge.entails(premise, statement.text).entailed;
  reward.citation_status = supported ? CitationStatus::correct : CitationStatus::incorrect;
  reward.r_citation = supported ? 0.5 : -0.5;
}

double refusal_reward(double r_score, bool answerable, double threshold) {
  if (!(r_score >= 0.0 && r_score <= 1.0)) throw ContractError("r_score", "r_score must be in [0,1]");
  const bool refusal_like = r_score > threshold;
  if (answerable) return refusal_like ? 0.0 : 0.5;
  return refusal_like ? r_score : 0.0;
}

std::string_view decision_hypothesis(bool final_is_refusal) {
  return final_is_refusal ? kRefusalDecision : kAnswerDecision;
}

double process_reward(std::string_view think, bool final_is_refusal, Judge& judge) {
  if (text::is_blank(think)) return 0.0;
  return judge.entails(think, decision_hypothesis(final_is_refusal)).score;
}

RewardBreakdown hierarchical_reward(const ParsedResponse& parsed, const Sample& sample, Stage stage,
                                    Judge& judge, const RewardOptions& options) {
  if (stage == Stage::stage1 && !sample.answerable)
    throw ContractError("sample.answerable", "stage1 rewards require an answerable sample (id " +
                                                 sample.id + ")");
  RewardBreakdown b;
  b.stage = stage;
  b.r_tag_count = tag_count_reward(parsed);
  b.r_format = parsed.format_ok ? 1.0 : 0.0;
  b.r_score = options.refusal_scorer ? options.refusal_scorer(parsed.answer, sample.gold_refusal)
                                     : refusal_score(parsed.answer, sample.gold_refusal);
  b.total = b.r_tag_count;
  if (b.r_format != 1.0 || b.r_tag_count != 1.0) return b;

  b.total += b.r_format;
  const bool refused = b.r_score > options.refusal_threshold;
  if (sample.answerable && !refused) {
    if (stage == Stage::stage2) b.r_refusal = refusal_reward(b.r_score, true, options.refusal_threshold);
    for (std::size_t i = 0; i < parsed.statements.size(); ++i) {
      const Statement& st = parsed.statements[i];
      StatementReward r = em_reward(st, sample.gold_claims, options.match_mode);
      r.statement_index = static_cast<int>(i);
      citation_reward(r, st, sample.documents, judge);
      b.r_em_total += r.r_em;
      b.r_citation_total += r.r_citation;
      b.statement_rewards.push_back(r);
    }
    if (options.mean_normalize && !parsed.statements.empty()) {
      b.r_em_total /= static_cast<double>(parsed.statements.size());
      b.r_citation_total /= static_cast<double>(parsed.statements.size());
    }
    b.total += b.r_refusal + b.r_em_total + b.r_citation_total;
  } else if (!sample.answerable) {
    b.r_refusal = refusal_reward(b.r_score, false, options.refusal_threshold);
    b.total += b.r_refusal;
  }
  if (options.want_process_reward) {
    b.r_process = process_reward(parsed.think.value_or(""), refused, judge);
    b.total += *b.r_process;
  }
  return b;
}

}  // namespace gg
