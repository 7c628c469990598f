#include "gg/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <unordered_set>

#include "gg/errors.hpp"
#include "gg/text.hpp"
#include "gg/wire.hpp"

namespace gg {

namespace {

constexpr DatasetTag kAllTags[] = {DatasetTag::asqa, DatasetTag::qampari, DatasetTag::eli5,
                                   DatasetTag::expertqa, DatasetTag::other};

// Unbiased draw in [0, bound) by rejection; std::uniform_int_distribution is
// not specified bit-for-bit across standard libraries.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

template <typename T>
void fisher_yates(std::vector<T>& items, std::mt19937_64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(draw_below(rng, i));
    std::swap(items[i - 1], items[j]);
  }
}

// First `count` entries of a seeded shuffle of `pool`.
std::vector<const Sample*> pick(std::vector<const Sample*> pool, std::size_t count,
                                std::mt19937_64& rng) {
  fisher_yates(pool, rng);
  if (pool.size() > count) pool.resize(count);
  return pool;
}

std::map<DatasetTag, std::vector<const Sample*>> by_tag(const std::vector<Sample>& corpus,
                                                        bool want_answerable) {
  std::map<DatasetTag, std::vector<const Sample*>> out;
  for (const Sample& s : corpus) {
    auto& bucket = out[s.dataset_tag];
    if (s.answerable == want_answerable) bucket.push_back(&s);
  }
  return out;
}

std::string shortfall(std::size_t got, std::size_t wanted, std::string_view what) {
  return "requested " + std::to_string(wanted) + " " + std::string(what) + " samples, only " +
         std::to_string(got) + " available";
}

}  // namespace

std::string_view to_string(DatasetTag tag) {
  switch (tag) {
    case DatasetTag::asqa: return "asqa";
    case DatasetTag::qampari: return "qampari";
    case DatasetTag::eli5: return "eli5";
    case DatasetTag::expertqa: return "expertqa";
    case DatasetTag::other: return "other";
  }
  return "other";
}

std::optional<DatasetTag> parse_dataset_tag(std::string_view s) {
  for (DatasetTag t : kAllTags)
    if (to_string(t) == s) return t;
  return std::nullopt;
}

void CurriculumConfig::validate() const {
  if (stage1_per_dataset < 1) throw ContractError("stage1_per_dataset", "stage1_per_dataset must be >= 1");
  if (stage2_per_dataset < 1) throw ContractError("stage2_per_dataset", "stage2_per_dataset must be >= 1");
  if (!(stage2_answerable_fraction >= 0.0 && stage2_answerable_fraction <= 1.0))
    throw ContractError("stage2_answerable_fraction", "stage2_answerable_fraction must be in [0,1]");
}

Sample parse_sample_record(std::string_view json_text) {
  wire::json j;
  try {
    j = wire::json::parse(json_text);
  } catch (const wire::json::parse_error& e) {
    throw ContractError("", std::string("malformed JSON: ") + e.what());
  }
  return wire::sample_from_json(j);
}

std::vector<Sample> load_corpus(std::istream& in) {
  std::vector<Sample> samples;
  std::unordered_set<std::string> seen;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (text::is_blank(line)) continue;
    try {
      Sample s = parse_sample_record(line);
      if (!seen.insert(s.id).second)
        throw CorpusError("line " + std::to_string(lineno) + ": duplicate sample id " + s.id);
      samples.push_back(std::move(s));
    } catch (const ContractError& e) {
      throw CorpusError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return samples;
}

std::vector<Sample> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open corpus file " + path.string());
  return load_corpus(in);
}

std::string serialize_sample(const Sample& sample) { return wire::to_json(sample).dump(); }

void write_corpus(std::ostream& out, const std::vector<Sample>& samples) {
  for (const Sample& s : samples) out << serialize_sample(s) << '\n';
}

Curriculum build_stage1(const std::vector<Sample>& corpus, const CurriculumConfig& cfg) {
  cfg.validate();
  Curriculum result{"stage1", cfg, {}, {}};
  std::mt19937_64 rng(cfg.seed);
  const auto wanted = static_cast<std::size_t>(cfg.stage1_per_dataset);
  auto pools = by_tag(corpus, true);
  if (pools.empty()) throw ContractError("corpus", "corpus is empty");
  for (auto& [tag, pool] : pools) {
    if (pool.empty())
      throw ContractError("corpus", "dataset " + std::string(to_string(tag)) +
                                        " has no answerable samples");
    if (pool.size() < wanted)
      result.warnings.push_back({tag, shortfall(pool.size(), wanted, "answerable")});
    for (const Sample* s : pick(pool, wanted, rng)) result.samples.push_back(*s);
  }
  return result;
}

Curriculum build_stage2(const std::vector<Sample>& corpus, const CurriculumConfig& cfg) {
  cfg.validate();
  Curriculum result{"stage2", cfg, {}, {}};
  std::mt19937_64 rng(cfg.seed);
  const auto per = static_cast<std::size_t>(cfg.stage2_per_dataset);
  const auto want_ans =
      static_cast<std::size_t>(std::llround(cfg.stage2_per_dataset * cfg.stage2_answerable_fraction));
  const std::size_t want_unans = per - want_ans;

  auto answerable = by_tag(corpus, true);
  auto unanswerable = by_tag(corpus, false);
  std::vector<const Sample*> chosen;
  for (auto& [tag, pool] : answerable) {
    auto& other = unanswerable[tag];
    if (pool.size() < want_ans)
      result.warnings.push_back({tag, shortfall(pool.size(), want_ans, "answerable")});
    if (other.size() < want_unans)
      result.warnings.push_back({tag, shortfall(other.size(), want_unans, "unanswerable")});
    for (const Sample* s : pick(pool, want_ans, rng)) chosen.push_back(s);
    for (const Sample* s : pick(other, want_unans, rng)) chosen.push_back(s);
  }
  fisher_yates(chosen, rng);
  result.samples.reserve(chosen.size());
  for (const Sample* s : chosen) result.samples.push_back(*s);
  return result;
}

void write_manifest(std::ostream& out, const Curriculum& curriculum,
                    const TrainingDefaults& training) {
  const CurriculumConfig& c = curriculum.config;
  wire::json header = {
      {"type", "header"},
      {"stage", curriculum.stage},
      {"count", curriculum.samples.size()},
      {"config",
       {{"stage1_per_dataset", c.stage1_per_dataset},
        {"stage2_per_dataset", c.stage2_per_dataset},
        {"stage2_answerable_fraction", c.stage2_answerable_fraction},
        {"seed", c.seed}}},
      {"training",
       {{"group_size", training.group_size},
        {"epochs", training.epochs},
        {"batch_size", training.batch_size},
        {"learning_rate", training.learning_rate}}},
  };
  out << header.dump() << '\n';
  for (const CurriculumWarning& w : curriculum.warnings)
    out << wire::json{{"type", "warning"}, {"dataset", to_string(w.dataset)}, {"message", w.message}}
               .dump()
        << '\n';
  for (const Sample& s : curriculum.samples)
    out << wire::json{{"type", "sample"},
                      {"id", s.id},
                      {"dataset", to_string(s.dataset_tag)},
                      {"answerable", s.answerable}}
               .dump()
        << '\n';
}

}  // namespace gg
