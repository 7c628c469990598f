// gg: command-line front end for the grounded-generation reward engine.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <pthread.h>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "gg/corpus.hpp"
#include "gg/errors.hpp"
#include "gg/service.hpp"
#include "gg/text.hpp"
#include "gg/trust_metrics.hpp"
#include "gg/wire.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitContract = 2;
constexpr int kExitTransport = 3;

struct JudgeFlags {
  std::string backend;  // empty: service if an endpoint is known, else oracle
  std::string nli_url;
  double tau_nli = 0.5;
  long timeout_ms = 0;
  std::size_t max_in_flight = 16;

  void add_to(CLI::App& app) {
    app.add_option("--judge", backend, "Entailment backend")->check(CLI::IsMember({"oracle", "service"}));
    app.add_option("--nli-url", nli_url, "NLI service base URL (env GG_NLI_URL)");
    app.add_option("--tau-nli", tau_nli, "Entailment threshold")->check(CLI::Range(0.0, 1.0));
    app.add_option("--nli-timeout-ms", timeout_ms, "NLI request timeout (env GG_NLI_TIMEOUT_MS)");
    app.add_option("--nli-max-in-flight", max_in_flight, "Concurrent NLI requests");
  }

  gg::JudgeConfig config() const {
    gg::JudgeConfig cfg;
    cfg.apply_env();
    if (!nli_url.empty()) cfg.endpoint = nli_url;
    if (timeout_ms > 0) cfg.timeout = std::chrono::milliseconds(timeout_ms);
    cfg.tau_nli = tau_nli;
    cfg.max_in_flight = max_in_flight;
    if (backend == "service" || (backend.empty() && cfg.endpoint))
      cfg.backend = gg::JudgeBackend::service;
    else
      cfg.backend = gg::JudgeBackend::oracle;
    return cfg;
  }
};

struct EngineFlags {
  double refusal_threshold = 0.85;
  double epsilon = gg::kDefaultAdvantageEpsilon;
  bool strict_match = false;
  unsigned parallelism = 1;

  void add_to(CLI::App& app) {
    app.add_option("--refusal-threshold", refusal_threshold, "r_score above which an answer is a refusal")
        ->check(CLI::Range(0.0, 1.0));
    app.add_option("--epsilon", epsilon, "Advantage normalization epsilon");
    app.add_flag("--strict-match", strict_match, "Exact-match on raw text instead of normalized text");
    app.add_option("--parallelism", parallelism, "Threads per group");
  }

  gg::EngineOptions options() const {
    gg::EngineOptions o;
    o.refusal_threshold = refusal_threshold;
    o.epsilon = epsilon;
    o.match_mode = strict_match ? gg::MatchMode::strict : gg::MatchMode::normalized;
    o.parallelism = parallelism;
    return o;
  }
};

std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gg::ContractError("input", "cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

gg::wire::json parse_json(const std::string& text, const std::string& what) {
  gg::wire::json j = gg::wire::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw gg::ContractError("", what + " is not valid JSON");
  return j;
}

int cmd_score(const std::string& input, const std::string& stage, const JudgeFlags& jf, const EngineFlags& ef,
              bool process) {
  gg::wire::RewardRequest request = gg::wire::request_from_json(parse_json(read_input(input), "request"));
  if (!stage.empty()) request.stage = *gg::parse_stage(stage);
  if (process) request.want_process_reward = true;
  auto judge = gg::make_judge(jf.config());
  std::cout << gg::wire::canonical(gg::wire::to_json(gg::run_reward_request(request, *judge, ef.options())));
  return kExitOk;
}

std::vector<gg::ResponseRecord> load_responses(const std::string& path, const std::vector<gg::Sample>& corpus,
                                               double threshold) {
  std::unordered_map<std::string, const gg::Sample*> by_id;
  for (const gg::Sample& s : corpus) by_id.emplace(s.id, &s);
  std::istringstream in(read_input(path));
  std::vector<gg::ResponseRecord> records;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (gg::text::is_blank(line)) continue;
    const std::string where = "responses line " + std::to_string(lineno) + ": ";
    gg::wire::json j = gg::wire::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw gg::ContractError("", where + "malformed JSON");
    if (!j.contains("id") || !j["id"].is_string()) throw gg::ContractError("id", where + "missing field id");
    if (!j.contains("response") || !j["response"].is_string())
      throw gg::ContractError("response", where + "missing field response");
    const std::string id = j["id"].get<std::string>();
    auto it = by_id.find(id);
    if (it == by_id.end()) throw gg::ContractError("id", where + "unknown sample id " + id);
    records.push_back(gg::make_record(*it->second, j["response"].get<std::string>(), threshold));
  }
  if (records.empty()) throw gg::ContractError("responses", "responses file is empty");
  return records;
}

int cmd_eval(const std::string& corpus_path, const std::string& responses_path, const JudgeFlags& jf,
             double threshold, bool skip_align, const std::string& csv_path) {
  std::vector<gg::Sample> corpus;
  try {
    corpus = gg::load_corpus(corpus_path);
  } catch (const gg::CorpusError& e) {
    throw gg::ContractError("corpus", e.what());
  }
  auto records = load_responses(responses_path, corpus, threshold);
  auto judge = gg::make_judge(jf.config());
  gg::Evaluation ev = gg::evaluate(records, corpus, *judge, {skip_align});
  if (!csv_path.empty()) {
    std::ofstream csv(csv_path);
    if (!csv) throw gg::ContractError("csv", "cannot write " + csv_path);
    gg::write_per_sample_csv(csv, ev.per_sample);
  }
  std::cout << gg::wire::canonical(gg::wire::to_json(ev.report));
  return kExitOk;
}

int cmd_parse(const std::string& input) {
  std::cout << gg::wire::canonical(gg::wire::to_json(gg::parse_response(read_input(input))));
  return kExitOk;
}

int cmd_curriculum(const std::string& corpus_path, const std::string& stage, gg::CurriculumConfig cfg,
                   const std::string& out_path) {
  std::vector<gg::Sample> corpus;
  try {
    corpus = gg::load_corpus(corpus_path);
  } catch (const gg::CorpusError& e) {
    throw gg::ContractError("corpus", e.what());
  }
  gg::Curriculum c = stage == "stage1" ? gg::build_stage1(corpus, cfg) : gg::build_stage2(corpus, cfg);
  for (const auto& w : c.warnings) std::cerr << "warning: " << gg::to_string(w.dataset) << ": " << w.message << '\n';
  if (out_path.empty() || out_path == "-") {
    gg::write_manifest(std::cout, c);
  } else {
    std::ofstream out(out_path);
    if (!out) throw gg::ContractError("output", "cannot write " + out_path);
    gg::write_manifest(out, c);
  }
  return kExitOk;
}

int cmd_serve(std::string bind, std::size_t concurrency, const JudgeFlags& jf, const EngineFlags& ef) {
  if (bind.empty()) {
    const char* env = std::getenv("GG_BIND_ADDR");
    bind = env && *env ? env : "127.0.0.1:8080";
  }
  gg::ServiceConfig cfg;
  auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw gg::ContractError("bind", "bind address must be host:port");
  cfg.host = bind.substr(0, colon);
  try {
    cfg.port = std::stoi(bind.substr(colon + 1));
  } catch (const std::exception&) {
    throw gg::ContractError("bind", "invalid port in " + bind);
  }
  cfg.concurrency_limit = concurrency;
  cfg.engine = ef.options();

  // Route SIGINT/SIGTERM to a waiter thread; stop() then drains in-flight work.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  gg::RewardService service(cfg, std::shared_ptr<gg::Judge>(gg::make_judge(jf.config())));
  int port = service.bind();
  std::cerr << "gg serve: listening on " << cfg.host << ':' << port << '\n';
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    service.stop();
  });
  service.run();
  if (waiter.joinable()) {
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
  }
  std::cerr << "gg serve: stopped\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grounded-generation reward and evaluation engine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", gg::wire::kEngineVersion);

  JudgeFlags judge_flags;
  EngineFlags engine_flags;
  std::string input, stage, corpus_path, responses_path, csv_path, bind, out_path;
  bool skip_align = false, process = false;
  std::size_t concurrency = 8;
  gg::CurriculumConfig ccfg;

  CLI::App* score = app.add_subcommand("score", "Score a RewardRequest and print a RewardResponse");
  score->add_option("input", input, "Request JSON file (default stdin)");
  score->add_option("--stage", stage, "Override the request stage")->check(CLI::IsMember({"stage1", "stage2"}));
  score->add_flag("--process", process, "Add the reasoning/decision process reward");
  judge_flags.add_to(*score);
  engine_flags.add_to(*score);

  CLI::App* eval = app.add_subcommand("eval", "Compute the TrustScore metric suite");
  eval->add_option("corpus", corpus_path, "Corpus JSONL")->required();
  eval->add_option("responses", responses_path, "Responses JSONL ({id, response})")->required();
  eval->add_flag("--skip-align", skip_align, "Do not compute %Align");
  eval->add_option("--csv", csv_path, "Write per-sample CSV here");
  eval->add_option("--refusal-threshold", engine_flags.refusal_threshold, "Refusal r_score threshold")
      ->check(CLI::Range(0.0, 1.0));
  judge_flags.add_to(*eval);

  CLI::App* serve = app.add_subcommand("serve", "Run the HTTP reward service");
  serve->add_option("--bind", bind, "host:port (env GG_BIND_ADDR)");
  serve->add_option("--concurrency", concurrency, "Maximum concurrent requests")->check(CLI::PositiveNumber);
  judge_flags.add_to(*serve);
  engine_flags.add_to(*serve);

  CLI::App* parse = app.add_subcommand("parse", "Parse one raw response and print its structure");
  parse->add_option("input", input, "Raw response file (default stdin)");

  CLI::App* curriculum = app.add_subcommand("curriculum", "Select a stage-1 or stage-2 training manifest");
  curriculum->add_option("corpus", corpus_path, "Corpus JSONL")->required();
  curriculum->add_option("--stage", stage, "Curriculum stage")->required()->check(CLI::IsMember({"stage1", "stage2"}));
  curriculum->add_option("--seed", ccfg.seed, "Sampling seed");
  curriculum->add_option("--stage1-per-dataset", ccfg.stage1_per_dataset, "Stage-1 samples per dataset");
  curriculum->add_option("--stage2-per-dataset", ccfg.stage2_per_dataset, "Stage-2 samples per dataset");
  curriculum->add_option("--answerable-fraction", ccfg.stage2_answerable_fraction, "Stage-2 answerable share");
  curriculum->add_option("-o,--output", out_path, "Manifest path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : kExitContract;
  }

  try {
    if (*score) return cmd_score(input, stage, judge_flags, engine_flags, process);
    if (*eval) return cmd_eval(corpus_path, responses_path, judge_flags, engine_flags.refusal_threshold, skip_align, csv_path);
    if (*serve) return cmd_serve(bind, concurrency, judge_flags, engine_flags);
    if (*parse) return cmd_parse(input);
    if (*curriculum) return cmd_curriculum(corpus_path, stage, ccfg, out_path);
  } catch (const gg::ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitContract;
  } catch (const gg::TransportError& e) {
    std::cerr << "judge error: " << e.what() << '\n';
    return kExitTransport;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
