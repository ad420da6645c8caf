#include "verve/corpus/synthetic.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <stdexcept>

#include "synthetic_topics.hpp"
#include "verve/text/tokenize.hpp"

namespace verve::corpus {

namespace {

using synth::Topic;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  std::size_t below(std::size_t n) { return n ? static_cast<std::size_t>(gen_() % n) : 0; }
  double uniform() { return static_cast<double>(gen_() >> 11) * (1.0 / 9007199254740992.0); }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[below(i)]);
  }

 private:
  std::mt19937_64 gen_;
};

// First person -> second person, word by word.
std::string second_person(std::string_view clause) {
  static const std::map<std::string, std::string> direct{
      {"i", "you"},         {"me", "you"},       {"my", "your"},      {"mine", "yours"},
      {"myself", "yourself"}, {"i'm", "you're"}, {"i've", "you've"},  {"i'd", "you'd"},
      {"i'll", "you'll"},   {"am", "are"}};
  auto ws = text::whitespace_tokens(clause);
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const bool after_i = i > 0 && (ws[i - 1] == "i" || ws[i - 1] == "you");
    if (ws[i] == "was" && after_i) {
      ws[i] = "were";
    } else if (ws[i] == "wasn't" && after_i) {
      ws[i] = "weren't";
    } else if (auto it = direct.find(ws[i]); it != direct.end()) {
      ws[i] = it->second;
    }
  }
  return text::join(ws);
}

// Fills {S} {O} {B} (first person), {S2} {O2} {B2} (second person), {F}
// feeling, {C} concern, {A} advice, {Q} question.
struct Slots {
  std::string s, o, b, f, c, a, q;
};

std::string fill(std::string_view tmpl, const Slots& sl) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] != '{') {
      out.push_back(tmpl[i]);
      continue;
    }
    const std::size_t close = tmpl.find('}', i);
    const std::string_view key = tmpl.substr(i + 1, close - i - 1);
    if (key == "S") out += sl.s;
    else if (key == "O") out += sl.o;
    else if (key == "B") out += sl.b;
    else if (key == "S2") out += second_person(sl.s);
    else if (key == "O2") out += second_person(sl.o);
    else if (key == "B2") out += second_person(sl.b);
    else if (key == "F") out += sl.f;
    else if (key == "C") out += sl.c;
    else if (key == "A") out += sl.a;
    else if (key == "Q") out += sl.q;
    else throw std::logic_error("unknown slot");
    i = close;
  }
  return text::detokenize(text::words(out));
}

const std::vector<std::string_view> kPromptTemplates{
    "{S}, but {O}. {B}.",
    "{S} and {O}, so i guess {B}.",
    "{S}. {O}. honestly, {B}.",
    "{S}, and {O}. i feel like {B}.",
    "even though {S}, {O}. maybe {B}.",
    "{S}. the problem is {O}, and {B}.",
};

const std::vector<std::string_view> kComplex{
    "it sounds like you feel {F} because {S2}, but {O2}.",
    "you're {F} that {O2}, and you're worried that {C}.",
    "{S2}, and it leaves you feeling {F} when {O2}.",
    "you feel {F} because part of you believes {B2}.",
    "you're worried that {C}, especially since {O2}.",
    "even though {S2}, {O2}, and you're afraid that {C}.",
    "you feel {F}, like {C}.",
    "so {B2}, and that leaves you feeling {F}.",
};

const std::vector<std::string_view> kSimple{
    "{S2}, but {O2}.",
    "so {B2}.",
    "you're saying that {B2}.",
    "{O2} even though {S2}.",
    "{S2}.",
    "you think {B2}.",
    "you feel like {B2}.",
};

const std::vector<std::string_view> kQuestion{
    "have you tried to {A}?",
    "why do you think {B2}?",
    "are you sure {S2}?",
    "{Q}?",
    "what makes you say {B2}?",
    "do you really believe {B2}?",
    "what would happen if you {A}?",
};

const std::vector<std::string_view> kAdvice{
    "you should {A}.",
    "you need to {A} and stop worrying so much.",
    "i think you should {A}.",
    "why don't you {A}?",
    "maybe you could {A}.",
    "try to {A} this week.",
    "you just have to {A}.",
};

const std::vector<std::string_view> kInput{
    "a lot of people find that it helps to {A}.",
    "one thing that works for many people is to {A}.",
    "it is common to feel this way, and it can help to {A}.",
};

const std::vector<std::string_view> kOther{
    "okay, let's talk about something else.",
    "i see. tell me more about your week.",
    "alright, we are almost out of time today.",
};

struct PromptSeed {
  const Topic* topic;
  Slots slots;
  std::string prompt;
};

std::vector<PromptSeed> make_prompts(std::size_t n, Rng& rng) {
  const auto& ts = synth::topics();
  std::vector<PromptSeed> out;
  std::set<std::string> seen;
  std::size_t guard = 0;
  while (out.size() < n) {
    if (++guard > n * 200) throw std::runtime_error("synthetic prompt space exhausted");
    const Topic& t = ts[out.size() % ts.size()];
    Slots sl;
    sl.s = rng.pick(t.situations);
    sl.o = rng.pick(t.outcomes);
    sl.b = rng.pick(t.beliefs);
    const std::string key = sl.s + "|" + sl.o + "|" + sl.b;
    if (!seen.insert(key).second) continue;
    sl.f = rng.pick(t.feelings);
    sl.c = rng.pick(t.concerns);
    sl.a = rng.pick(t.advice);
    sl.q = rng.pick(t.questions);
    std::string prompt = fill(rng.pick(kPromptTemplates), sl);
    out.push_back({&t, std::move(sl), std::move(prompt)});
  }
  return out;
}

std::string nr_behavior(Rng& rng) {
  const double u = rng.uniform();
  if (u < 0.45) return "question";
  if (u < 0.85) return "advice";
  if (u < 0.97) return "therapist input";
  return "other";
}

const std::vector<std::string_view>& nr_templates(const std::string& behavior) {
  if (behavior == "question") return kQuestion;
  if (behavior == "advice") return kAdvice;
  if (behavior == "therapist input") return kInput;
  return kOther;
}

// Responses for one prompt with distinct template indices per family. Slot
// values for feeling/concern/advice are re-drawn per response.
std::string respond(const PromptSeed& p, const std::vector<std::string_view>& family,
                    std::set<std::size_t>& used, Rng& rng) {
  std::size_t idx = rng.below(family.size());
  for (std::size_t tries = 0; used.contains(idx) && tries < family.size(); ++tries)
    idx = (idx + 1) % family.size();
  used.insert(idx);
  Slots sl = p.slots;
  sl.f = rng.pick(p.topic->feelings);
  sl.c = rng.pick(p.topic->concerns);
  sl.a = rng.pick(p.topic->advice);
  sl.q = rng.pick(p.topic->questions);
  return fill(family[idx], sl);
}

}  // namespace

std::vector<Exchange> synthesize_pair(const SyntheticPairOptions& opt) {
  if (opt.complex_reflections == 0) throw std::invalid_argument("need at least one prompt");
  if (opt.simple_reflections > opt.complex_reflections)
    throw std::invalid_argument("at most one simple reflection per prompt");
  Rng rng(opt.seed);
  const std::size_t n_prompts = opt.complex_reflections;
  auto prompts = make_prompts(n_prompts, rng);

  // NR responses spread as evenly as possible across prompts.
  std::vector<std::size_t> nr_per_prompt(n_prompts, opt.non_reflections / n_prompts);
  std::vector<std::size_t> order(n_prompts);
  for (std::size_t i = 0; i < n_prompts; ++i) order[i] = i;
  rng.shuffle(order);
  for (std::size_t i = 0; i < opt.non_reflections % n_prompts; ++i) ++nr_per_prompt[order[i]];
  std::vector<bool> has_sr(n_prompts, false);
  rng.shuffle(order);
  for (std::size_t i = 0; i < opt.simple_reflections; ++i) has_sr[order[i]] = true;

  struct Draft {
    Exchange ex;
    std::string text_behavior;  // behavior of the text as written
  };
  std::vector<Draft> drafts;
  for (std::size_t pi = 0; pi < n_prompts; ++pi) {
    const auto& p = prompts[pi];
    std::size_t k = 0;
    auto emit = [&](Reflection label, std::string response, std::string behavior) {
      Draft d;
      d.ex.id = "pair-" + std::to_string(pi) + "-" + std::to_string(k++);
      d.ex.dataset = Dataset::Pair;
      d.ex.prompt = p.prompt;
      d.ex.response = std::move(response);
      d.ex.reflection_label = label;
      d.text_behavior = std::move(behavior);
      drafts.push_back(std::move(d));
    };
    std::set<std::size_t> used_c, used_s;
    emit(Reflection::CR, respond(p, kComplex, used_c, rng), "reflection");
    if (has_sr[pi]) emit(Reflection::SR, respond(p, kSimple, used_s, rng), "reflection");
    std::map<std::string, std::set<std::size_t>> used_nr;
    for (std::size_t j = 0; j < nr_per_prompt[pi]; ++j) {
      const std::string behavior = nr_behavior(rng);
      emit(Reflection::NR, respond(p, nr_templates(behavior), used_nr[behavior], rng), behavior);
    }
  }

  // Count-preserving label swaps between adjacent levels; SR/CR disagreement
  // is the more common kind.
  if (opt.annotation_noise > 0) {
    std::map<Reflection, std::vector<std::size_t>> by;
    for (std::size_t i = 0; i < drafts.size(); ++i) by[*drafts[i].ex.reflection_label].push_back(i);
    for (auto& [label, v] : by) rng.shuffle(v);
    const double swapped_items = opt.annotation_noise * static_cast<double>(drafts.size());
    std::size_t sr_cr = static_cast<std::size_t>(0.6 * swapped_items / 2.0 + 0.5);
    std::size_t nr_sr = static_cast<std::size_t>(0.4 * swapped_items / 2.0 + 0.5);
    auto& nr = by[Reflection::NR];
    auto& sr = by[Reflection::SR];
    auto& cr = by[Reflection::CR];
    const std::size_t sr_budget = sr.size() / 2;
    sr_cr = std::min({sr_cr, sr_budget, cr.size()});
    nr_sr = std::min({nr_sr, sr.size() - sr_cr, nr.size()});
    std::size_t s = 0;
    for (std::size_t i = 0; i < sr_cr; ++i, ++s) {
      drafts[sr[s]].ex.reflection_label = Reflection::CR;
      drafts[cr[i]].ex.reflection_label = Reflection::SR;
    }
    for (std::size_t i = 0; i < nr_sr; ++i, ++s) {
      drafts[sr[s]].ex.reflection_label = Reflection::NR;
      drafts[nr[i]].ex.reflection_label = Reflection::SR;
    }
  }

  std::vector<Exchange> out;
  out.reserve(drafts.size());
  for (auto& d : drafts) {
    if (d.ex.reflection_label == Reflection::NR)
      d.ex.behavior_label = d.text_behavior == "reflection" ? "other" : d.text_behavior;
    out.push_back(std::move(d.ex));
  }
  return out;
}

std::vector<ReferenceReflection> synthesize_references(const SyntheticPairOptions& opt) {
  Rng rng(opt.seed);
  auto prompts = make_prompts(opt.complex_reflections, rng);
  Rng ref_rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<ReferenceReflection> out;
  for (const auto& p : prompts) {
    std::set<std::size_t> used;
    out.push_back({p.prompt, respond(p, kComplex, used, ref_rng)});
  }
  return out;
}

void write_synthetic_annomi_csv(const std::filesystem::path& path,
                                const SyntheticAnnomiOptions& opt) {
  Rng rng(opt.seed);
  const auto& ts = synth::topics();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "mi_quality,transcript_id,video_title,topic,utterance_id,interlocutor,timestamp,"
         "utterance_text,main_therapist_behaviour,client_talk_type\n";
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q.push_back('"');
      q.push_back(c);
    }
    return q + "\"";
  };
  static const std::vector<std::string_view> fillers{"um,", "uh,", "you know,", "i mean--",
                                                     "mm,", "so,"};
  for (std::size_t t = 0; t < opt.transcripts; ++t) {
    const Topic& topic = ts[rng.below(ts.size())];
    const std::string quality = rng.uniform() < 0.8 ? "high" : "low";
    for (std::size_t u = 0; u < opt.turns_per_transcript; ++u) {
      const bool client = u % 2 == 0;
      Slots sl;
      sl.s = rng.pick(topic.situations);
      sl.o = rng.pick(topic.outcomes);
      sl.b = rng.pick(topic.beliefs);
      sl.f = rng.pick(topic.feelings);
      sl.c = rng.pick(topic.concerns);
      sl.a = rng.pick(topic.advice);
      sl.q = rng.pick(topic.questions);
      std::string utt;
      std::string behavior;
      if (client) {
        const double u2 = rng.uniform();
        if (u2 < 0.15) {
          utt = "Mm-hmm.";
        } else if (u2 < 0.25) {
          utt = "-and " + fill(rng.pick(kPromptTemplates), sl);
        } else {
          utt = std::string(rng.pick(fillers)) + " " + fill(rng.pick(kPromptTemplates), sl);
          if (rng.uniform() < 0.3) utt = "Well, " + utt;
        }
      } else {
        const double u2 = rng.uniform();
        if (u2 < 0.35) {
          behavior = "reflection";
          std::set<std::size_t> used;
          PromptSeed p{&topic, sl, ""};
          utt = respond(p, rng.uniform() < 0.5 ? kComplex : kSimple, used, rng);
        } else if (u2 < 0.65) {
          behavior = "question";
          utt = fill(rng.pick(kQuestion), sl);
        } else if (u2 < 0.9) {
          behavior = "therapist_input";
          utt = fill(rng.pick(rng.uniform() < 0.5 ? kInput : kAdvice), sl);
        } else {
          behavior = "other";
          utt = rng.uniform() < 0.5 ? "Okay." : fill(rng.pick(kOther), sl);
        }
        if (rng.uniform() < 0.2) utt = "Um, " + utt;
      }
      out << quality << ',' << t << ',' << quote("synthetic session " + std::to_string(t)) << ','
          << topic.name << ',' << u << ',' << (client ? "client" : "therapist") << ",00:00:00,"
          << quote(utt) << ',' << (client ? "n/a" : behavior) << ','
          << (client ? "neutral" : "n/a") << '\n';
    }
  }
}

}  // namespace verve::corpus
