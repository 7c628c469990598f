#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "gg/corpus.hpp"
#include "gg/judge.hpp"
#include "gg/response_parser.hpp"

namespace gg {

struct ResponseRecord {
  std::string sample_id;
  ParsedResponse parsed;
  bool refused = false;
};

/// Parses `raw` and derives `refused` from the answer's r_score against the
/// gold refusal. A response with no <answer> block is judged on its text
/// outside the think block.
ResponseRecord make_record(const Sample& sample, std::string_view raw,
                           double refusal_threshold = 0.85);

struct MetricCounts {
  std::size_t questions = 0;
  std::size_t answerable = 0;
  std::size_t unanswerable = 0;
  std::size_t answered = 0;
  std::size_t refused = 0;
  std::size_t answered_answerable = 0;
  std::size_t refused_unanswerable = 0;
  std::size_t ac_answered = 0;    // answered questions with non-empty A_G ∩ A_D
  std::size_t ac_answerable = 0;  // answerable questions with non-empty A_G ∩ A_D
  std::size_t statements = 0;
  std::size_t recalled_statements = 0;
  std::size_t citations = 0;
  std::size_t precise_citations = 0;
  std::size_t align_considered = 0;
  std::size_t aligned = 0;
  std::size_t align_skipped = 0;  // records without a think block

  bool operator==(const MetricCounts&) const = default;
};

struct MetricsReport {
  double ar = 0.0;  // percentage
  double f1_ans = 0.0, f1_ref = 0.0, f1_gr = 0.0;
  double p_ac = 0.0, r_ac = 0.0, f1_ac = 0.0;
  double p_cite = 0.0, r_cite = 0.0, f1_gc = 0.0;
  double trust = 0.0;
  std::optional<double> percent_align;  // percentage; absent when skipped or undefined
  MetricCounts counts;
};

struct SampleMetrics {
  std::string id;
  bool refused = false;
  std::optional<double> ac_q;
  std::size_t statements = 0;
  std::size_t recalled_statements = 0;
  std::size_t citations = 0;
  std::size_t precise_citations = 0;
};

/// Harmonic mean; 0 when p + r = 0.
double f1_score(double precision, double recall);

double answer_ratio(const std::vector<ResponseRecord>& records);
double answer_ratio(std::size_t answered, std::size_t total);

struct GroundedRefusal {
  double p_ans = 0.0, r_ans = 0.0, f1_ans = 0.0;
  double p_ref = 0.0, r_ref = 0.0, f1_ref = 0.0;
  double f1_gr = 0.0;
};
GroundedRefusal grounded_refusal_f1(const std::vector<ResponseRecord>& records,
                                    const std::vector<Sample>& samples);

struct AnswerCorrectness {
  double p_ac = 0.0, r_ac = 0.0, f1_ac = 0.0;
};
AnswerCorrectness answer_correctness(const std::vector<ResponseRecord>& records,
                                     const std::vector<Sample>& samples, Judge& judge);

struct CitationQuality {
  double p_cite = 0.0, r_cite = 0.0, f1_gc = 0.0;
};
CitationQuality citation_f1(const std::vector<ResponseRecord>& records,
                            const std::vector<Sample>& samples, Judge& judge);

/// Mean of the three components; inputs must share one scale.
double trust_score(double f1_gr, double f1_ac, double f1_gc);

/// Percentage of think-bearing records whose reasoning entails their
/// answer/refuse decision; nullopt when no record has a think block.
std::optional<double> percent_align(const std::vector<ResponseRecord>& records, Judge& judge);

struct EvalOptions {
  bool skip_align = false;
};

struct Evaluation {
  MetricsReport report;
  std::vector<SampleMetrics> per_sample;  // in record order
};

Evaluation evaluate(const std::vector<ResponseRecord>& records, const std::vector<Sample>& samples,
                    Judge& judge, const EvalOptions& options = {});

/// id,refused,ac_q,statements,recalled_statements,citations,precise_citations
void write_per_sample_csv(std::ostream& out, const std::vector<SampleMetrics>& rows);

}  // namespace gg
