#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace gg {

/// Gold response for questions the documents cannot answer.
inline constexpr std::string_view kCanonicalRefusal =
    "I apologize, but I couldn’t find an answer to your question in the search results";

struct Document {
  int index = 0;  // 1-based position within the sample
  std::string title;
  std::string content;

  bool operator==(const Document&) const = default;
};

struct GoldClaim {
  std::string claim_text;
  std::optional<bool> supported_by_docs;

  bool operator==(const GoldClaim&) const = default;
};

enum class DatasetTag { asqa, qampari, eli5, expertqa, other };

std::string_view to_string(DatasetTag tag);
std::optional<DatasetTag> parse_dataset_tag(std::string_view s);

struct Sample {
  std::string id;
  std::string question;
  std::vector<Document> documents;
  std::vector<GoldClaim> gold_claims;
  bool answerable = true;
  std::string gold_refusal{kCanonicalRefusal};
  DatasetTag dataset_tag = DatasetTag::other;

  bool operator==(const Sample&) const = default;
};

struct CurriculumConfig {
  int stage1_per_dataset = 100;
  int stage2_per_dataset = 1000;
  double stage2_answerable_fraction = 0.5;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Defaults a downstream GRPO trainer should use alongside a manifest.
struct TrainingDefaults {
  int group_size = 8;
  int epochs = 4;
  int batch_size = 384;
  double learning_rate = 1e-5;
};

struct CurriculumWarning {
  DatasetTag dataset;
  std::string message;
};

struct Curriculum {
  std::string stage;  // "stage1" or "stage2"
  CurriculumConfig config;
  std::vector<Sample> samples;
  std::vector<CurriculumWarning> warnings;
};

/// Thrown by the loaders; the message leads with "line N:".
class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<Sample> load_corpus(const std::filesystem::path& path);
std::vector<Sample> load_corpus(std::istream& in);

/// Parses one record (already decoded JSON text) and validates it. Throws
/// ContractError carrying the offending field path.
Sample parse_sample_record(std::string_view json_text);

/// Inverse of the loader: one JSON object per sample, no trailing newline.
std::string serialize_sample(const Sample& sample);
void write_corpus(std::ostream& out, const std::vector<Sample>& samples);

Curriculum build_stage1(const std::vector<Sample>& corpus, const CurriculumConfig& cfg);
Curriculum build_stage2(const std::vector<Sample>& corpus, const CurriculumConfig& cfg);

/// JSONL manifest: a header echoing config and training defaults, one
/// warning record per shortfall, then one record per selected sample id.
void write_manifest(std::ostream& out, const Curriculum& curriculum,
                    const TrainingDefaults& training = {});

}  // namespace gg
