#include "gg/trust_metrics.hpp"

#include <cmath>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "gg/errors.hpp"
#include "gg/rewards.hpp"
#include "gg/text.hpp"

namespace gg {

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

struct Pair {
  const ResponseRecord* record;
  const Sample* sample;
};

std::vector<Pair> align(const std::vector<ResponseRecord>& records, const std::vector<Sample>& samples) {
  std::unordered_map<std::string_view, const Sample*> by_id;
  for (const Sample& s : samples) by_id.emplace(s.id, &s);
  std::vector<Pair> out;
  std::unordered_set<std::string_view> covered;
  for (const ResponseRecord& r : records) {
    auto it = by_id.find(r.sample_id);
    if (it == by_id.end()) throw ContractError("sample_id", "response for unknown sample id " + r.sample_id);
    if (!covered.insert(r.sample_id).second)
      throw ContractError("sample_id", "duplicate response for sample id " + r.sample_id);
    out.push_back({&r, it->second});
  }
  if (covered.size() != samples.size()) {
    std::string msg = "missing responses for sample ids:";
    std::size_t missing = 0;
    for (const Sample& s : samples) {
      if (covered.count(s.id)) continue;
      if (missing < 10) msg += " " + s.id;
      ++missing;
    }
    throw ContractError("sample_id", msg + " (" + std::to_string(missing) + " missing)");
  }
  return out;
}

std::string all_documents(const Sample& s) {
  std::string out;
  for (const Document& d : s.documents) {
    if (!out.empty()) out += '\n';
    out += d.content;
  }
  return out;
}

// Indices (into gold_claims) of claims in A_G ∩ A_D.
std::vector<std::size_t> supported_claims(const Sample& s, Judge& judge) {
  std::vector<std::size_t> out;
  std::string premise;
  for (std::size_t i = 0; i < s.gold_claims.size(); ++i) {
    const GoldClaim& c = s.gold_claims[i];
    bool supported;
    if (c.supported_by_docs) {
      supported = *c.supported_by_docs;
    } else {
      if (premise.empty()) premise = all_documents(s);
      supported = !text::is_blank(c.claim_text) && judge.entails(premise, c.claim_text).entailed;
    }
    if (supported) out.push_back(i);
  }
  return out;
}

// AC^q, or nullopt when A_G ∩ A_D is empty.
std::optional<double> answer_correctness_q(const ResponseRecord& r, const Sample& s, Judge& judge) {
  if (s.gold_claims.empty()) return std::nullopt;
  std::vector<std::size_t> gd = supported_claims(s, judge);
  if (gd.empty()) return std::nullopt;
  const std::string answer = text::normalize(strip_citations(r.parsed.answer));
  std::size_t hit = 0;
  for (std::size_t i : gd) {
    std::string claim = text::normalize(s.gold_claims[i].claim_text);
    if (!claim.empty() && answer.find(claim) != std::string::npos) ++hit;
  }
  return static_cast<double>(hit) / static_cast<double>(gd.size());
}

std::string valid_premise(const std::vector<int>& cites, const std::vector<Document>& docs,
                          std::optional<std::size_t> skip = std::nullopt) {
  std::string out;
  for (std::size_t k = 0; k < cites.size(); ++k) {
    if (skip && *skip == k) continue;
    int c = cites[k];
    if (c < 1 || static_cast<std::size_t>(c) > docs.size()) continue;
    if (!out.empty()) out += '\n';
    out += docs[static_cast<std::size_t>(c) - 1].content;
  }
  return out;
}

bool supports(Judge& judge, const std::string& premise, const std::string& hypothesis) {
  if (text::is_blank(premise) || text::is_blank(hypothesis)) return false;
  return judge.entails(premise, hypothesis).entailed;
}

struct CitationTally {
  std::size_t statements = 0, recalled = 0, citations = 0, precise = 0;
};

CitationTally citation_tally(const ResponseRecord& r, const Sample& s, Judge& judge) {
  CitationTally t;
  if (r.refused) return t;
  const auto& docs = s.documents;
  for (const Statement& st : r.parsed.statements) {
    ++t.statements;
    t.citations += st.citations.size();
    if (!supports(judge, valid_premise(st.citations, docs), st.text)) continue;
    ++t.recalled;
    for (std::size_t k = 0; k < st.citations.size(); ++k) {
      int c = st.citations[k];
      if (c < 1 || static_cast<std::size_t>(c) > docs.size()) continue;
      bool alone = supports(judge, docs[static_cast<std::size_t>(c) - 1].content, st.text);
      bool rest = supports(judge, valid_premise(st.citations, docs, k), st.text);
      if (alone || !rest) ++t.precise;
    }
  }
  return t;
}

}  // namespace

ResponseRecord make_record(const Sample& sample, std::string_view raw, double refusal_threshold) {
  ResponseRecord r;
  r.sample_id = sample.id;
  r.parsed = parse_response(raw);
  if (!r.parsed.has_answer_block) {
    std::string rest(raw);
    const std::string close(tag_literal(Tag::think_close));
    if (auto pos = rest.rfind(close); pos != std::string::npos) rest = rest.substr(pos + close.size());
    for (Tag t : kAllFormatTags) {
      const std::string lit(tag_literal(t));
      for (auto pos = rest.find(lit); pos != std::string::npos; pos = rest.find(lit, pos))
        rest.erase(pos, lit.size());
    }
    r.parsed.answer = std::string(text::trim(rest));
    r.parsed.statements = segment_statements(r.parsed.answer);
  }
  r.refused = refusal_score(r.parsed.answer, sample.gold_refusal) > refusal_threshold;
  return r;
}

double f1_score(double precision, double recall) {
  double sum = precision + recall;
  return sum == 0.0 ? 0.0 : 2.0 * precision * recall / sum;
}

double answer_ratio(std::size_t answered, std::size_t total) {
  if (total == 0) throw ContractError("records", "answer ratio of an empty set");
  return 100.0 * static_cast<double>(answered) / static_cast<double>(total);
}

double answer_ratio(const std::vector<ResponseRecord>& records) {
  std::size_t answered = 0;
  for (const ResponseRecord& r : records)
    if (!r.refused) ++answered;
  return answer_ratio(answered, records.size());
}

GroundedRefusal grounded_refusal_f1(const std::vector<ResponseRecord>& records,
                                    const std::vector<Sample>& samples) {
  double answered = 0, answerable = 0, tp_ans = 0, refused = 0, unanswerable = 0, tp_ref = 0;
  for (const Pair& p : align(records, samples)) {
    const bool ans = !p.record->refused;
    answered += ans;
    refused += !ans;
    answerable += p.sample->answerable;
    unanswerable += !p.sample->answerable;
    tp_ans += ans && p.sample->answerable;
    tp_ref += !ans && !p.sample->answerable;
  }
  GroundedRefusal g;
  g.p_ans = ratio(tp_ans, answered);
  g.r_ans = ratio(tp_ans, answerable);
  g.f1_ans = f1_score(g.p_ans, g.r_ans);
  g.p_ref = ratio(tp_ref, refused);
  g.r_ref = ratio(tp_ref, unanswerable);
  g.f1_ref = f1_score(g.p_ref, g.r_ref);
  g.f1_gr = (g.f1_ans + g.f1_ref) / 2.0;
  return g;
}

AnswerCorrectness answer_correctness(const std::vector<ResponseRecord>& records,
                                     const std::vector<Sample>& samples, Judge& judge) {
  double p_sum = 0, p_den = 0, r_sum = 0, r_den = 0;
  for (const Pair& p : align(records, samples)) {
    const bool answered = !p.record->refused;
    if (!answered && !p.sample->answerable) continue;
    std::optional<double> ac = answer_correctness_q(*p.record, *p.sample, judge);
    if (!ac) continue;
    if (answered) {
      p_sum += *ac;
      p_den += 1;
    }
    if (p.sample->answerable) {
      r_sum += answered ? *ac : 0.0;
      r_den += 1;
    }
  }
  AnswerCorrectness a;
  a.p_ac = ratio(p_sum, p_den);
  a.r_ac = ratio(r_sum, r_den);
  a.f1_ac = f1_score(a.p_ac, a.r_ac);
  return a;
}

CitationQuality citation_f1(const std::vector<ResponseRecord>& records,
                            const std::vector<Sample>& samples, Judge& judge) {
  CitationTally total;
  for (const Pair& p : align(records, samples)) {
    CitationTally t = citation_tally(*p.record, *p.sample, judge);
    total.statements += t.statements;
    total.recalled += t.recalled;
    total.citations += t.citations;
    total.precise += t.precise;
  }
  CitationQuality q;
  q.p_cite = ratio(static_cast<double>(total.precise), static_cast<double>(total.citations));
  q.r_cite = ratio(static_cast<double>(total.recalled), static_cast<double>(total.statements));
  q.f1_gc = f1_score(q.p_cite, q.r_cite);
  return q;
}

double trust_score(double f1_gr, double f1_ac, double f1_gc) {
  const double v[] = {f1_gr, f1_ac, f1_gc};
  bool any_pct = false, any_unit = false;
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) throw ContractError("trust", "trust components must be finite and >= 0");
    (x > 1.0 ? any_pct : any_unit) = true;
  }
  if (any_pct && any_unit)
    throw ContractError("trust", "trust components mix unit-interval and percentage scales");
  return (f1_gr + f1_ac + f1_gc) / 3.0;
}

std::optional<double> percent_align(const std::vector<ResponseRecord>& records, Judge& judge) {
  std::size_t n = 0, aligned = 0;
  for (const ResponseRecord& r : records) {
    if (!r.parsed.think || text::is_blank(*r.parsed.think)) continue;
    ++n;
    if (judge.entails(*r.parsed.think, decision_hypothesis(r.refused)).entailed) ++aligned;
  }
  if (n == 0) return std::nullopt;
  return 100.0 * static_cast<double>(aligned) / static_cast<double>(n);
}

Evaluation evaluate(const std::vector<ResponseRecord>& records, const std::vector<Sample>& samples,
                    Judge& judge, const EvalOptions& options) {
  if (records.empty()) throw ContractError("records", "no responses to evaluate");
  const std::vector<Pair> pairs = align(records, samples);

  Evaluation ev;
  MetricsReport& m = ev.report;
  MetricCounts& c = m.counts;
  double p_sum = 0, r_sum = 0;
  for (const Pair& p : pairs) {
    const ResponseRecord& r = *p.record;
    const Sample& s = *p.sample;
    const bool answered = !r.refused;
    ++c.questions;
    (s.answerable ? c.answerable : c.unanswerable) += 1;
    (answered ? c.answered : c.refused) += 1;
    if (answered && s.answerable) ++c.answered_answerable;
    if (!answered && !s.answerable) ++c.refused_unanswerable;

    SampleMetrics row;
    row.id = r.sample_id;
    row.refused = r.refused;
    if (answered || s.answerable) {
      if (std::optional<double> ac = answer_correctness_q(r, s, judge)) {
        if (answered) {
          row.ac_q = *ac;
          p_sum += *ac;
          ++c.ac_answered;
        }
        if (s.answerable) {
          r_sum += answered ? *ac : 0.0;
          ++c.ac_answerable;
        }
      }
    }
    CitationTally t = citation_tally(r, s, judge);
    row.statements = t.statements;
    row.recalled_statements = t.recalled;
    row.citations = t.citations;
    row.precise_citations = t.precise;
    c.statements += t.statements;
    c.recalled_statements += t.recalled;
    c.citations += t.citations;
    c.precise_citations += t.precise;

    if (r.parsed.think && !text::is_blank(*r.parsed.think)) {
      if (!options.skip_align) {
        ++c.align_considered;
        if (judge.entails(*r.parsed.think, decision_hypothesis(r.refused)).entailed) ++c.aligned;
      }
    } else {
      ++c.align_skipped;
    }
    ev.per_sample.push_back(std::move(row));
  }

  m.ar = answer_ratio(c.answered, c.questions);
  GroundedRefusal g = grounded_refusal_f1(records, samples);
  m.f1_ans = g.f1_ans;
  m.f1_ref = g.f1_ref;
  m.f1_gr = g.f1_gr;
  m.p_ac = ratio(p_sum, static_cast<double>(c.ac_answered));
  m.r_ac = ratio(r_sum, static_cast<double>(c.ac_answerable));
  m.f1_ac = f1_score(m.p_ac, m.r_ac);
  m.p_cite = ratio(static_cast<double>(c.precise_citations), static_cast<double>(c.citations));
  m.r_cite = ratio(static_cast<double>(c.recalled_statements), static_cast<double>(c.statements));
  m.f1_gc = f1_score(m.p_cite, m.r_cite);
  m.trust = trust_score(m.f1_gr, m.f1_ac, m.f1_gc);
  if (!options.skip_align && c.align_considered > 0)
    m.percent_align = 100.0 * static_cast<double>(c.aligned) / static_cast<double>(c.align_considered);
  return ev;
}

void write_per_sample_csv(std::ostream& out, const std::vector<SampleMetrics>& rows) {
  auto quote = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) {
      if (ch == '"') q += '"';
      q += ch;
    }
    return q + "\"";
  };
  out << "id,refused,ac_q,statements,recalled_statements,citations,precise_citations\n";
  for (const SampleMetrics& r : rows) {
    out << quote(r.id) << ',' << (r.refused ? "true" : "false") << ',';
    if (r.ac_q) out << *r.ac_q;
    out << ',' << r.statements << ',' << r.recalled_statements << ',' << r.citations << ','
        << r.precise_citations << '\n';
  }
}

}  // namespace gg
