#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace verve::corpus {

enum class Dataset { Pair, AnnoMI };
enum class Reflection { NR = 0, SR = 1, CR = 2 };

inline constexpr std::array<Reflection, 3> kAllReflections{Reflection::NR, Reflection::SR,
                                                           Reflection::CR};

std::string_view to_string(Dataset d);
std::string_view to_string(Reflection r);
Dataset parse_dataset(std::string_view s);
// Throws std::invalid_argument naming the value.
Reflection parse_reflection(std::string_view s);

bool is_reflection(Reflection r);

// One client prompt and the counselor response that followed it.
struct Exchange {
  std::string id;
  Dataset dataset = Dataset::Pair;
  std::string prompt;
  std::string response;
  std::optional<Reflection> reflection_label;
  std::optional<std::string> behavior_label;

  bool operator==(const Exchange&) const = default;
};

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws CorpusError when prompt/response are blank or an AnnoMI exchange is
// not labeled NR.
void validate(const Exchange& ex);

nlohmann::json to_json(const Exchange& ex);
Exchange exchange_from_json(const nlohmann::json& j);

struct LabelCounts {
  std::map<Reflection, std::size_t> by_label;
  std::size_t unlabeled = 0;
  double mean_response_words = 0.0;
};
LabelCounts count_labels(const std::vector<Exchange>& data);

// JSONL reader: one exchange per line, blank lines skipped. Errors name the
// 1-based line number.
std::vector<Exchange> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<Exchange>& data);

// PAIR loader: like read_jsonl but every record must carry a reflection label
// and the dataset is forced to PAIR.
std::vector<Exchange> load_pair(const std::filesystem::path& path);

}  // namespace verve::corpus
