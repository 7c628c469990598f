#include "gg/wire.hpp"

#include "gg/errors.hpp"
#include "gg/text.hpp"

namespace gg::wire {

namespace {

std::string join(const std::string& prefix, const std::string& field) {
  return prefix.empty() ? field : prefix + "." + field;
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null())
    throw ContractError(join(path, key), "missing field " + join(path, key));
  return *it;
}

std::string require_string(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_string()) throw ContractError(join(path, key), "field " + join(path, key) + " must be a string");
  return v.get<std::string>();
}

bool require_bool(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_boolean()) throw ContractError(join(path, key), "field " + join(path, key) + " must be a boolean");
  return v.get<bool>();
}

const json& require_array(const json& obj, const std::string& key, const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_array()) throw ContractError(join(path, key), "field " + join(path, key) + " must be an array");
  return v;
}

}  // namespace

json to_json(const Sample& s) {
  json docs = json::array();
  for (const Document& d : s.documents) docs.push_back({{"title", d.title}, {"text", d.content}});
  json claims = json::array();
  for (const GoldClaim& c : s.gold_claims) {
    json cj = {{"text", c.claim_text}};
    if (c.supported_by_docs) cj["supported"] = *c.supported_by_docs;
    claims.push_back(std::move(cj));
  }
  return {{"id", s.id},
          {"question", s.question},
          {"docs", std::move(docs)},
          {"claims", std::move(claims)},
          {"answerable", s.answerable},
          {"refusal", s.gold_refusal},
          {"dataset", to_string(s.dataset_tag)}};
}

Sample sample_from_json(const json& j, const std::string& prefix) {
  if (!j.is_object()) throw ContractError(prefix, (prefix.empty() ? "record" : prefix) + " must be a JSON object");
  Sample s;
  s.id = require_string(j, "id", prefix);
  if (text::is_blank(s.id)) throw ContractError(join(prefix, "id"), "field " + join(prefix, "id") + " is empty");
  s.question = require_string(j, "question", prefix);

  const json& docs = require_array(j, "docs", prefix);
  if (docs.empty()) throw ContractError(join(prefix, "docs"), "field " + join(prefix, "docs") + " is empty");
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const std::string path = join(prefix, "docs[" + std::to_string(i) + "]");
    if (!docs[i].is_object()) throw ContractError(path, path + " must be an object");
    Document d;
    d.index = static_cast<int>(i) + 1;
    if (docs[i].contains("title") && !docs[i]["title"].is_null()) d.title = require_string(docs[i], "title", path);
    d.content = require_string(docs[i], "text", path);
    if (text::is_blank(d.content)) throw ContractError(path + ".text", "field " + path + ".text is empty");
    s.documents.push_back(std::move(d));
  }

  if (j.contains("claims") && !j["claims"].is_null()) {
    const json& claims = require_array(j, "claims", prefix);
    for (std::size_t i = 0; i < claims.size(); ++i) {
      const std::string path = join(prefix, "claims[" + std::to_string(i) + "]");
      if (!claims[i].is_object()) throw ContractError(path, path + " must be an object");
      GoldClaim c;
      c.claim_text = require_string(claims[i], "text", path);
      if (text::normalize(c.claim_text).empty())
        throw ContractError(path + ".text", "field " + path + ".text is empty after normalization");
      if (claims[i].contains("supported") && !claims[i]["supported"].is_null())
        c.supported_by_docs = require_bool(claims[i], "supported", path);
      s.gold_claims.push_back(std::move(c));
    }
  }

  s.answerable = require_bool(j, "answerable", prefix);
  if (s.answerable && s.gold_claims.empty())
    throw ContractError(join(prefix, "claims"), "answerable sample needs at least one claim in " + join(prefix, "claims"));

  if (j.contains("refusal") && !j["refusal"].is_null()) {
    s.gold_refusal = require_string(j, "refusal", prefix);
    if (text::is_blank(s.gold_refusal))
      throw ContractError(join(prefix, "refusal"), "field " + join(prefix, "refusal") + " is empty");
  }
  if (j.contains("dataset") && !j["dataset"].is_null()) {
    std::string tag = require_string(j, "dataset", prefix);
    auto parsed = parse_dataset_tag(tag);
    if (!parsed) throw ContractError(join(prefix, "dataset"), "unknown dataset tag " + tag);
    s.dataset_tag = *parsed;
  }
  return s;
}

json to_json(const ParsedResponse& p) {
  json counts = json::object();
  for (Tag t : kAllFormatTags) counts[std::string(tag_key(t))] = p.tag_counts[t];
  json statements = json::array();
  for (const Statement& s : p.statements)
    statements.push_back({{"text", s.text}, {"citations", s.citations}, {"span", {s.span.begin, s.span.end}}});
  return {{"raw", p.raw},
          {"think", p.think ? json(*p.think) : json(nullptr)},
          {"answer", p.answer},
          {"tag_counts", std::move(counts)},
          {"format_ok", p.format_ok},
          {"statements", std::move(statements)}};
}

json to_json(const StatementReward& r) {
  return {{"statement_index", r.statement_index},
          {"has_em", r.has_em},
          {"r_em", r.r_em},
          {"citation_status", to_string(r.citation_status)},
          {"r_citation", r.r_citation}};
}

json to_json(const RewardBreakdown& b) {
  json per = json::array();
  for (const StatementReward& r : b.statement_rewards) per.push_back(to_json(r));
  return {{"r_tag_count", b.r_tag_count},
          {"r_format", b.r_format},
          {"r_em_total", b.r_em_total},
          {"r_citation_total", b.r_citation_total},
          {"r_refusal", b.r_refusal},
          {"r_process", b.r_process ? json(*b.r_process) : json(nullptr)},
          {"r_score", b.r_score},
          {"total", b.total},
          {"statement_rewards", std::move(per)},
          {"stage", to_string(b.stage)}};
}

json to_json(const MetricsReport& m) {
  const MetricCounts& c = m.counts;
  json j = {{"ar", m.ar},         {"f1_ans", m.f1_ans}, {"f1_ref", m.f1_ref}, {"f1_gr", m.f1_gr},
            {"p_ac", m.p_ac},     {"r_ac", m.r_ac},     {"f1_ac", m.f1_ac},   {"p_cite", m.p_cite},
            {"r_cite", m.r_cite}, {"f1_gc", m.f1_gc},   {"trust", m.trust}};
  if (m.percent_align) j["percent_align"] = *m.percent_align;
  j["counts"] = {{"questions", c.questions},
                 {"answerable", c.answerable},
                 {"unanswerable", c.unanswerable},
                 {"answered", c.answered},
                 {"refused", c.refused},
                 {"answered_answerable", c.answered_answerable},
                 {"refused_unanswerable", c.refused_unanswerable},
                 {"ac_answered", c.ac_answered},
                 {"ac_answerable", c.ac_answerable},
                 {"statements", c.statements},
                 {"recalled_statements", c.recalled_statements},
                 {"citations", c.citations},
                 {"precise_citations", c.precise_citations},
                 {"align_considered", c.align_considered},
                 {"aligned", c.aligned},
                 {"align_skipped", c.align_skipped}};
  return j;
}

RewardRequest request_from_json(const json& j) {
  if (!j.is_object()) throw ContractError("", "request body must be a JSON object");
  RewardRequest r;
  std::string stage = require_string(j, "stage", "");
  auto parsed = parse_stage(stage);
  if (!parsed) throw ContractError("stage", "stage must be stage1 or stage2");
  r.stage = *parsed;
  r.sample = sample_from_json(require(j, "sample", ""), "sample");
  const json& cands = require_array(j, "candidates", "");
  for (std::size_t i = 0; i < cands.size(); ++i) {
    if (!cands[i].is_string())
      throw ContractError("candidates[" + std::to_string(i) + "]", "candidates must be strings");
    r.candidates.push_back(cands[i].get<std::string>());
  }
  if (j.contains("want_process_reward") && !j["want_process_reward"].is_null())
    r.want_process_reward = require_bool(j, "want_process_reward", "");
  return r;
}

json to_json(const RewardRequest& r) {
  return {{"stage", to_string(r.stage)},
          {"sample", to_json(r.sample)},
          {"candidates", r.candidates},
          {"want_process_reward", r.want_process_reward}};
}

json to_json(const RewardResponse& r) {
  json breakdowns = json::array();
  for (const RewardBreakdown& b : r.breakdowns) breakdowns.push_back(to_json(b));
  return {{"rewards", r.rewards},
          {"advantages", r.advantages},
          {"breakdowns", std::move(breakdowns)},
          {"engine_version", r.engine_version}};
}

std::string canonical(const json& j) {
  return j.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
}

}  // namespace gg::wire
