#include "verve/corpus/exchange.hpp"

#include <fstream>

#include "verve/text/tokenize.hpp"

namespace verve::corpus {

std::string_view to_string(Dataset d) { return d == Dataset::Pair ? "PAIR" : "ANNOMI"; }

std::string_view to_string(Reflection r) {
  switch (r) {
    case Reflection::NR: return "NR";
    case Reflection::SR: return "SR";
    case Reflection::CR: return "CR";
  }
  return "NR";
}

Dataset parse_dataset(std::string_view s) {
  if (s == "PAIR" || s == "pair") return Dataset::Pair;
  if (s == "ANNOMI" || s == "AnnoMI" || s == "annomi") return Dataset::AnnoMI;
  throw std::invalid_argument("unknown dataset: " + std::string(s));
}

Reflection parse_reflection(std::string_view s) {
  if (s == "NR") return Reflection::NR;
  if (s == "SR") return Reflection::SR;
  if (s == "CR") return Reflection::CR;
  throw std::invalid_argument("unknown reflection label: " + std::string(s));
}

bool is_reflection(Reflection r) { return r == Reflection::SR || r == Reflection::CR; }

void validate(const Exchange& ex) {
  if (text::trim(ex.prompt).empty()) throw CorpusError("exchange " + ex.id + ": empty prompt");
  if (text::trim(ex.response).empty()) throw CorpusError("exchange " + ex.id + ": empty response");
  if (ex.dataset == Dataset::AnnoMI && ex.reflection_label != Reflection::NR)
    throw CorpusError("exchange " + ex.id + ": AnnoMI exchanges must be labeled NR");
}

nlohmann::json to_json(const Exchange& ex) {
  nlohmann::json j;
  j["id"] = ex.id;
  j["dataset"] = to_string(ex.dataset);
  j["prompt"] = ex.prompt;
  j["response"] = ex.response;
  j["reflection_label"] =
      ex.reflection_label ? nlohmann::json(to_string(*ex.reflection_label)) : nlohmann::json();
  j["behavior_label"] = ex.behavior_label ? nlohmann::json(*ex.behavior_label) : nlohmann::json();
  return j;
}

Exchange exchange_from_json(const nlohmann::json& j) {
  Exchange ex;
  ex.id = j.at("id").get<std::string>();
  ex.dataset = parse_dataset(j.at("dataset").get<std::string>());
  ex.prompt = j.at("prompt").get<std::string>();
  ex.response = j.at("response").get<std::string>();
  if (j.contains("reflection_label") && !j["reflection_label"].is_null())
    ex.reflection_label = parse_reflection(j["reflection_label"].get<std::string>());
  if (j.contains("behavior_label") && !j["behavior_label"].is_null())
    ex.behavior_label = j["behavior_label"].get<std::string>();
  return ex;
}

LabelCounts count_labels(const std::vector<Exchange>& data) {
  LabelCounts c;
  for (Reflection r : kAllReflections) c.by_label[r] = 0;
  double words = 0.0;
  for (const auto& ex : data) {
    if (ex.reflection_label) {
      ++c.by_label[*ex.reflection_label];
    } else {
      ++c.unlabeled;
    }
    words += static_cast<double>(text::whitespace_tokens(ex.response).size());
  }
  if (!data.empty()) c.mean_response_words = words / static_cast<double>(data.size());
  return c;
}

std::vector<Exchange> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw CorpusError("cannot open " + path.string());
  std::vector<Exchange> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      Exchange ex = exchange_from_json(nlohmann::json::parse(line));
      validate(ex);
      out.push_back(std::move(ex));
    } catch (const std::exception& e) {
      throw CorpusError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Exchange>& data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CorpusError("cannot write " + path.string());
  for (const auto& ex : data) out << to_json(ex).dump() << '\n';
}

std::vector<Exchange> load_pair(const std::filesystem::path& path) {
  auto data = read_jsonl(path);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (!data[i].reflection_label)
      throw CorpusError(path.string() + ": record " + data[i].id + " has no reflection_label");
    data[i].dataset = Dataset::Pair;
  }
  return data;
}

}  // namespace verve::corpus
