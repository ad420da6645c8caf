#include "verve/text/lexicon.hpp"

#include <cctype>
#include <unordered_set>

#include "verve/text/tokenize.hpp"

namespace verve::text {

namespace {

using WordSet = std::unordered_set<std::string_view>;

const WordSet& stopwords() {
  static const WordSet s{
      "i", "me", "my", "myself", "we", "our", "ours", "ourselves", "you", "your", "yours",
      "yourself", "yourselves", "he", "him", "his", "himself", "she", "her", "hers", "herself",
      "it", "its", "itself", "they", "them", "their", "theirs", "themselves", "what", "which",
      "who", "whom", "this", "that", "these", "those", "am", "is", "are", "was", "were", "be",
      "been", "being", "have", "has", "had", "having", "do", "does", "did", "doing", "a", "an",
      "the", "and", "but", "if", "or", "because", "as", "until", "while", "of", "at", "by",
      "for", "with", "about", "against", "between", "into", "through", "during", "before",
      "after", "above", "below", "to", "from", "up", "down", "in", "out", "on", "off", "over",
      "under", "again", "further", "then", "once", "here", "there", "when", "where", "why",
      "how", "all", "any", "both", "each", "few", "more", "most", "other", "some", "such", "no",
      "nor", "not", "only", "own", "same", "so", "than", "too", "very", "s", "t", "can", "will",
      "just", "don", "should", "now", "d", "ll", "m", "o", "re", "ve", "y", "ain", "aren",
      "couldn", "didn", "doesn", "hadn", "hasn", "haven", "isn", "ma", "mightn", "mustn",
      "needn", "shan", "shouldn", "wasn", "weren", "won", "wouldn", "i'm", "i've", "i'd",
      "i'll", "you're", "you've", "you'd", "you'll", "he's", "she's", "it's", "we're",
      "they're", "that's", "there's", "what's", "don't", "doesn't", "didn't", "can't",
      "won't", "isn't", "aren't", "wasn't", "weren't", "haven't", "hasn't", "shouldn't",
      "wouldn't", "couldn't", "let's", "would", "could", "might", "must", "also", "really",
      "well", "like", "get", "got", "yeah", "okay", "ok", "um", "uh", "mm", "oh", "maybe",
      "something", "anything", "everything", "nothing", "lot", "much", "many", "even", "still",
      "thing", "things", "way", "going", "gonna", "kind", "sort", "yes"};
  return s;
}

const WordSet& determiners() {
  static const WordSet s{"a", "an", "the", "this", "that", "these", "those", "every", "each",
                         "some", "any", "no", "another", "all", "both", "either", "neither",
                         "much", "many", "few", "several", "such", "what", "which", "whatever"};
  return s;
}

const WordSet& pronouns() {
  static const WordSet s{
      "i", "me", "my", "mine", "myself", "we", "us", "our", "ours", "ourselves", "you", "your",
      "yours", "yourself", "yourselves", "he", "him", "his", "himself", "she", "her", "hers",
      "herself", "it", "its", "itself", "they", "them", "their", "theirs", "themselves", "who",
      "whom", "whose", "something", "anything", "everything", "nothing", "someone", "anyone",
      "everyone", "somebody", "anybody", "everybody", "nobody", "i'm", "i've", "i'd", "i'll",
      "you're", "you've", "you'd", "you'll", "he's", "she's", "it's", "we're", "we've",
      "they're", "they've", "that's", "there's", "what's", "let's", "one"};
  return s;
}

const WordSet& possessives() {
  static const WordSet s{"my", "your", "his", "her", "its", "our", "their"};
  return s;
}

const WordSet& prepositions() {
  static const WordSet s{"of", "at", "by", "for", "with", "about", "against", "between",
                         "into", "through", "during", "before", "after", "above", "below",
                         "to", "from", "up", "down", "in", "out", "on", "off", "over", "under",
                         "around", "without", "within", "like", "than", "since", "toward",
                         "towards", "upon", "across", "behind", "beyond", "near"};
  return s;
}

const WordSet& conjunctions() {
  static const WordSet s{"and", "but", "or", "nor", "so", "yet", "because", "if", "although",
                         "though", "while", "when", "whether", "unless", "until", "as",
                         "whereas", "then", "where", "how", "why"};
  return s;
}

const WordSet& auxiliaries() {
  static const WordSet s{
      "am", "is", "are", "was", "were", "be", "been", "being", "have", "has", "had", "having",
      "do", "does", "did", "can", "could", "will", "would", "shall", "should", "may", "might",
      "must", "don't", "doesn't", "didn't", "can't", "cannot", "won't", "isn't", "aren't",
      "wasn't", "weren't", "haven't", "hasn't", "hadn't", "shouldn't", "wouldn't", "couldn't",
      "'s", "'re", "'ve", "'m", "'ll", "'d", "gonna", "wanna"};
  return s;
}

const WordSet& be_forms() {
  static const WordSet s{"am", "is", "are", "was", "were", "be", "been", "being", "'s", "'re",
                         "'m", "isn't", "aren't", "wasn't", "weren't", "i'm", "you're",
                         "he's", "she's", "it's", "we're", "they're"};
  return s;
}

const WordSet& adverbs() {
  static const WordSet s{"not", "never", "always", "often", "sometimes", "usually", "very",
                         "really", "too", "just", "also", "only", "even", "still", "already",
                         "again", "now", "here", "there", "then", "soon", "almost", "quite",
                         "rather", "perhaps", "maybe", "ever", "anymore", "yet", "once",
                         "together", "away", "back", "so", "well", "much", "more", "most",
                         "less", "least", "enough", "right", "instead", "probably", "today",
                         "tonight", "tomorrow", "yesterday", "lately", "recently", "n't",
                         "else", "anyway", "actually", "basically", "definitely"};
  return s;
}

const WordSet& adjectives() {
  static const WordSet s{
      "good", "bad", "new", "old", "big", "small", "long", "short", "high", "low", "great",
      "little", "own", "other", "same", "different", "important", "hard", "easy", "difficult",
      "unhealthy", "healthy", "sad", "happy", "angry", "worried", "anxious", "afraid", "scared",
      "frustrated", "overwhelmed", "stressed", "tired", "exhausted", "lonely", "alone", "sick",
      "hopeless", "helpless", "upset", "guilty", "ashamed", "embarrassed", "nervous", "stuck",
      "trapped", "sure", "unsure", "certain", "uncertain", "ready", "able", "unable", "free",
      "safe", "fine", "whole", "full", "empty", "real", "true", "right", "wrong", "best",
      "worst", "better", "worse", "enough", "certain", "clear", "close", "fair", "unfair",
      "late", "early", "whole", "strong", "weak", "heavy", "fat", "thin", "young", "daily",
      "weekly", "regular", "extra", "single", "serious", "busy", "bored", "confused",
      "disappointed", "discouraged", "hurt", "jealous", "proud", "relieved", "torn",
      "conflicted", "devastated", "terrified", "hesitant", "reluctant", "determined",
      "motivated", "unmotivated", "uncomfortable", "comfortable", "difficult", "impossible",
      "possible", "painful", "harmful", "helpful", "useful", "useless", "worthless",
      "responsible", "physical", "mental", "emotional", "social", "financial", "medical",
      "personal", "entire", "main", "favorite", "nice", "kind", "calm", "quiet", "loud",
      "hungry", "fit", "active", "lazy", "afraid", "pregnant", "sober", "drunk", "high",
      "angry", "mad", "upset", "miserable", "unhappy", "satisfied", "dissatisfied", "healthier",
      "bigger", "smaller", "harder", "easier", "older", "younger", "several", "last", "next",
      "first", "second", "few", "many", "most", "more", "less", "little"};
  return s;
}

// Base forms; inflections are derived in is_known_verb.
const WordSet& verb_bases() {
  static const WordSet s{
      "be", "have", "do", "say", "go", "get", "make", "know", "think", "take", "see", "come",
      "want", "look", "use", "find", "give", "tell", "work", "call", "try", "ask", "need",
      "feel", "become", "leave", "put", "mean", "keep", "let", "begin", "seem", "help", "talk",
      "turn", "start", "show", "hear", "play", "run", "move", "like", "live", "believe", "hold",
      "bring", "happen", "write", "sit", "stand", "lose", "pay", "meet", "include", "continue",
      "set", "learn", "change", "lead", "understand", "watch", "follow", "stop", "create",
      "speak", "read", "spend", "grow", "open", "walk", "win", "offer", "remember", "love",
      "consider", "appear", "buy", "wait", "serve", "die", "send", "expect", "build", "stay",
      "fall", "cut", "reach", "kill", "remain", "suggest", "raise", "pass", "sell", "require",
      "report", "decide", "pull", "eat", "drink", "smoke", "quit", "sleep", "exercise", "cook",
      "gain", "drop", "fail", "worry", "care", "handle", "manage", "cope", "deal", "struggle",
      "avoid", "cut", "skip", "hate", "wish", "hope", "fear", "blame", "plan", "cry", "argue",
      "fight", "yell", "drive", "join", "miss", "share", "trust", "fix", "improve", "relax",
      "notice", "realize", "admit", "refuse", "agree", "expect", "seem", "tend", "afford",
      "bother", "matter", "hurt", "support", "motivate", "check", "visit", "listen", "focus",
      "succeed", "relapse", "diet", "binge", "crave", "resist", "reduce", "increase", "add",
      "limit", "join", "attend", "finish", "forget", "protect", "deserve", "feed", "push",
      "get", "give", "keep", "lie", "wake", "rest", "weigh", "owe", "earn", "save", "spend",
      "borrow", "study", "pray", "vape", "gamble", "bet", "text", "shout", "date", "marry",
      "divorce", "move", "graduate", "retire", "volunteer", "recover", "heal", "treat",
      "take", "swallow", "inject", "snack", "order", "prepare", "replace", "switch", "stick",
      "cheat", "give", "sound", "hear", "guess", "suppose", "imagine", "wonder", "prefer",
      "enjoy", "celebrate", "complain", "explain", "describe", "mention", "say", "thank",
      "apologize", "promise", "accept", "allow", "force", "prevent", "cause", "end", "lock",
      "hide", "wear", "carry", "throw", "catch", "break", "steal", "waste", "count", "measure"};
  return s;
}

const WordSet& irregular_verb_forms() {
  static const WordSet s{
      "said", "went", "gone", "got", "gotten", "made", "knew", "known", "thought", "took",
      "taken", "saw", "seen", "came", "found", "gave", "given", "told", "felt", "became",
      "left", "kept", "began", "begun", "heard", "ran", "held", "brought", "wrote", "written",
      "sat", "stood", "lost", "paid", "met", "learnt", "led", "understood", "spoke", "spoken",
      "spent", "grew", "grown", "won", "bought", "sent", "built", "fell", "fallen", "sold",
      "ate", "eaten", "drank", "drunk", "slept", "fought", "drove", "driven", "hid", "hidden",
      "wore", "worn", "threw", "thrown", "caught", "broke", "broken", "stole", "stolen", "did",
      "done", "goes", "does", "has", "had", "woke", "woken", "lay", "lain", "quit", "put",
      "let", "set", "cut", "hurt", "cost", "meant", "dealt", "fed", "forgot", "forgotten"};
  return s;
}

bool ends_with(std::string_view w, std::string_view suffix) {
  return w.size() > suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

bool is_known_verb(std::string_view w) {
  if (verb_bases().contains(w) || irregular_verb_forms().contains(w)) return true;
  std::string buf;
  auto base_is = [&](std::string_view stem) {
    buf.assign(stem);
    if (verb_bases().contains(buf)) return true;
    buf.push_back('e');
    return verb_bases().contains(buf);
  };
  if (ends_with(w, "ies")) {
    buf.assign(w.substr(0, w.size() - 3));
    buf.push_back('y');
    if (verb_bases().contains(buf)) return true;
  }
  if (ends_with(w, "es") && base_is(w.substr(0, w.size() - 2))) return true;
  if (ends_with(w, "s") && verb_bases().contains(w.substr(0, w.size() - 1))) return true;
  if (ends_with(w, "ied")) {
    buf.assign(w.substr(0, w.size() - 3));
    buf.push_back('y');
    if (verb_bases().contains(buf)) return true;
  }
  for (std::string_view suf : {std::string_view("ed"), std::string_view("ing")}) {
    if (!ends_with(w, suf)) continue;
    std::string_view stem = w.substr(0, w.size() - suf.size());
    if (base_is(stem)) return true;
    // Doubled final consonant: "stopped", "quitting".
    if (stem.size() > 2 && stem[stem.size() - 1] == stem[stem.size() - 2] &&
        verb_bases().contains(stem.substr(0, stem.size() - 1)))
      return true;
  }
  return false;
}

bool is_number(std::string_view w) {
  static const WordSet words{"one", "two", "three", "four", "five", "six", "seven", "eight",
                             "nine", "ten", "twenty", "hundred", "thousand"};
  if (words.contains(w)) return true;
  bool digit = false;
  for (char c : w) {
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digit = true;
    } else if (c != '.' && c != ',' && c != '%') {
      return false;
    }
  }
  return digit;
}

bool adjective_suffix(std::string_view w) {
  for (std::string_view suf : {"ous", "ful", "ive", "able", "ible", "less", "ish", "ical", "ary"}) {
    if (ends_with(w, suf) && w.size() > suf.size() + 2) return true;
  }
  return false;
}

}  // namespace

bool is_stopword(std::string_view word) { return stopwords().contains(word); }

std::string_view pos_name(Pos p) {
  switch (p) {
    case Pos::Noun: return "NOUN";
    case Pos::Adj: return "ADJ";
    case Pos::Verb: return "VERB";
    case Pos::Adv: return "ADV";
    case Pos::Pron: return "PRON";
    case Pos::Det: return "DET";
    case Pos::Prep: return "ADP";
    case Pos::Conj: return "CONJ";
    case Pos::Aux: return "AUX";
    case Pos::Num: return "NUM";
    case Pos::Punct: return "PUNCT";
    case Pos::Other: return "X";
  }
  return "X";
}

std::vector<Pos> LexiconTagger::tag(std::span<const std::string> ws) const {
  std::vector<Pos> out(ws.size(), Pos::Noun);
  for (std::size_t i = 0; i < ws.size(); ++i) {
    const std::string_view w = ws[i];
    const std::string_view prev = i ? std::string_view(ws[i - 1]) : std::string_view();
    const Pos prev_pos = i ? out[i - 1] : Pos::Other;
    const bool after_nominal_det = determiners().contains(prev) || possessives().contains(prev) ||
                                   prev_pos == Pos::Adj;
    const bool after_verb_trigger =
        prev == "to" || (auxiliaries().contains(prev) && !be_forms().contains(prev)) ||
        prev == "i" || prev == "you" || prev == "we" || prev == "they";

    Pos p;
    if (is_punctuation(w)) {
      p = Pos::Punct;
    } else if (is_number(w)) {
      p = Pos::Num;
    } else if (possessives().contains(w)) {
      p = Pos::Pron;
    } else if (determiners().contains(w) && w != "that") {
      p = Pos::Det;
    } else if (auxiliaries().contains(w)) {
      p = Pos::Aux;
    } else if (pronouns().contains(w) || w == "that") {
      p = Pos::Pron;
    } else if (prepositions().contains(w) && w != "like") {
      p = Pos::Prep;
    } else if (conjunctions().contains(w)) {
      p = Pos::Conj;
    } else if (adverbs().contains(w)) {
      p = Pos::Adv;
    } else if (adjectives().contains(w)) {
      p = Pos::Adj;
    } else if (w == "like") {
      p = after_verb_trigger ? Pos::Verb : Pos::Prep;
    } else if (is_known_verb(w)) {
      if (after_nominal_det) {
        p = Pos::Noun;
      } else if (ends_with(w, "ing")) {
        p = (be_forms().contains(prev) || prev_pos == Pos::Verb || after_verb_trigger ||
             prev_pos == Pos::Adv)
                ? Pos::Verb
                : Pos::Noun;
      } else if (ends_with(w, "ed") && be_forms().contains(prev)) {
        p = Pos::Adj;
      } else if (verb_bases().contains(w) && !after_verb_trigger && prev_pos != Pos::Adv &&
                 prev_pos != Pos::Pron && prev_pos != Pos::Noun && i > 0) {
        // Bare base form with no subject or auxiliary before it reads as a noun
        // ("a diet", "of work") except sentence-initially (imperatives).
        p = (prev_pos == Pos::Prep || prev_pos == Pos::Conj) ? Pos::Noun : Pos::Verb;
      } else {
        p = Pos::Verb;
      }
    } else if (ends_with(w, "ly") && w.size() > 4 && w != "family" && w != "belly") {
      p = Pos::Adv;
    } else if (adjective_suffix(w)) {
      p = Pos::Adj;
    } else if (ends_with(w, "ed") && w.size() > 4) {
      p = be_forms().contains(prev) ? Pos::Adj : Pos::Verb;
    } else if (ends_with(w, "ing") && w.size() > 4) {
      p = (be_forms().contains(prev) || after_verb_trigger) ? Pos::Verb : Pos::Noun;
    } else if (w.find('\'') != std::string_view::npos) {
      p = Pos::Other;
    } else {
      p = Pos::Noun;
    }
    out[i] = p;
  }
  return out;
}

std::shared_ptr<const PosTagger> default_tagger() {
  static const auto tagger = std::make_shared<const LexiconTagger>();
  return tagger;
}

}  // namespace verve::text
