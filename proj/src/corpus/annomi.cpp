#include "verve/corpus/annomi.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "verve/text/tokenize.hpp"

namespace verve::corpus {

namespace {

std::string bare(std::string_view token) {
  std::string t = text::to_lower(token);
  while (!t.empty() && (t.back() == ',' || t.back() == '.' || t.back() == '?' || t.back() == '!'))
    t.pop_back();
  return t;
}

}  // namespace

std::string strip_disfluencies(const std::string& raw, const AnnomiFilter& cfg) {
  const auto tokens = text::whitespace_tokens(raw);
  std::vector<std::vector<std::string>> patterns;
  for (const auto& d : cfg.disfluencies) {
    auto p = text::whitespace_tokens(text::to_lower(d));
    if (!p.empty()) patterns.push_back(std::move(p));
  }
  // Longest patterns first so "i mean--" wins over a hypothetical "i".
  std::stable_sort(patterns.begin(), patterns.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });

  std::vector<std::string> kept;
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::size_t skip = 0;
    for (const auto& p : patterns) {
      if (i + p.size() > tokens.size()) continue;
      bool match = true;
      for (std::size_t k = 0; k < p.size() && match; ++k) {
        const std::string tok = text::to_lower(tokens[i + k]);
        match = tok == p[k] || bare(tokens[i + k]) == p[k];
      }
      if (match) {
        skip = p.size();
        break;
      }
    }
    if (skip) {
      i += skip;
    } else {
      kept.push_back(tokens[i++]);
    }
  }
  return text::join(kept);
}

std::string normalize_behavior(std::string_view raw) {
  std::string b = text::to_lower(text::trim(raw));
  std::replace(b.begin(), b.end(), '_', ' ');
  return b;
}

std::vector<Exchange> filter_annomi(const std::vector<TurnPair>& pairs, const AnnomiFilter& cfg) {
  std::vector<Exchange> out;
  std::size_t n = 0;
  for (const auto& p : pairs) {
    const std::string behavior = normalize_behavior(p.behavior);
    if (behavior == "reflection" || behavior.empty()) continue;
    const std::string raw_client = text::trim(p.client);
    if (raw_client.empty() || raw_client.front() == '-' || raw_client.back() == '-') continue;
    const std::string client = strip_disfluencies(raw_client, cfg);
    if (client.empty() || client.front() == '-' || client.back() == '-') continue;
    const std::string counselor = strip_disfluencies(text::trim(p.counselor), cfg);
    if (text::whitespace_tokens(client).size() < cfg.min_client_words) continue;
    if (text::whitespace_tokens(counselor).size() < cfg.min_counselor_words) continue;
    Exchange ex;
    ex.id = p.source_id.empty() ? "annomi-" + std::to_string(n) : p.source_id;
    ex.dataset = Dataset::AnnoMI;
    ex.prompt = client;
    ex.response = counselor;
    ex.reflection_label = Reflection::NR;
    ex.behavior_label = behavior;
    out.push_back(std::move(ex));
    ++n;
  }
  return out;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string data = ss.str();

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const char c = data[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        any = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        any = true;
        break;
      case '\r':
        break;
      case '\n':
        if (any || !field.empty()) {
          row.push_back(std::move(field));
          rows.push_back(std::move(row));
        }
        row.clear();
        field.clear();
        any = false;
        break;
      default:
        field.push_back(c);
        any = true;
    }
  }
  if (quoted) throw CorpusError(path.string() + ": unterminated quoted field");
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<TurnPair> flatten_annomi_csv(const std::filesystem::path& path) {
  const auto rows = read_csv(path);
  if (rows.empty()) return {};
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].size(); ++i) col[text::trim(rows[0][i])] = i;
  for (const char* need :
       {"transcript_id", "utterance_id", "interlocutor", "utterance_text", "main_therapist_behaviour"}) {
    if (!col.contains(need)) throw CorpusError(path.string() + ": missing column " + need);
  }
  struct Utt {
    long utterance;
    std::string speaker;
    std::string text;
    std::string behavior;
  };
  std::map<std::string, std::vector<Utt>> transcripts;
  std::vector<std::string> order;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    auto get = [&](const char* name) -> std::string {
      const std::size_t i = col.at(name);
      return i < row.size() ? row[i] : std::string();
    };
    const std::string tid = get("transcript_id");
    if (!transcripts.contains(tid)) order.push_back(tid);
    long uid = 0;
    try {
      uid = std::stol(get("utterance_id"));
    } catch (const std::exception&) {
      throw CorpusError(path.string() + ":" + std::to_string(r + 1) + ": bad utterance_id");
    }
    transcripts[tid].push_back(
        {uid, text::to_lower(text::trim(get("interlocutor"))), get("utterance_text"),
         get("main_therapist_behaviour")});
  }
  std::vector<TurnPair> pairs;
  for (const auto& tid : order) {
    auto utts = transcripts[tid];
    std::stable_sort(utts.begin(), utts.end(),
                     [](const Utt& a, const Utt& b) { return a.utterance < b.utterance; });
    for (std::size_t i = 0; i + 1 < utts.size(); ++i) {
      if (utts[i].speaker == "client" && utts[i + 1].speaker == "therapist") {
        pairs.push_back({utts[i].text, utts[i + 1].text, utts[i + 1].behavior,
                         "annomi-" + tid + "-" + std::to_string(utts[i + 1].utterance)});
      }
    }
  }
  return pairs;
}

}  // namespace verve::corpus
