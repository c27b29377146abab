#include "mevir/profiler.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mevir {
namespace {

std::vector<std::string> split_words(std::string_view phrase) {
  std::vector<std::string> out;
  std::istringstream in{std::string(phrase)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

EmftProfile emft(std::initializer_list<std::pair<Foundation, double>> weights) {
  EmftProfile::Values v{};
  for (auto [f, w] : weights) v[static_cast<std::size_t>(f)] = w;
  return EmftProfile::normalized(v);
}

MacProfile mac(std::initializer_list<MacDomain> domains) {
  MacProfile::Values v{};
  for (auto d : domains) v[static_cast<std::size_t>(d)] = 1.0;
  return MacProfile::normalized(v);
}

std::size_t count_phrase(const std::vector<std::string>& tokens, const std::vector<std::string>& phrase) {
  if (phrase.empty() || phrase.size() > tokens.size()) return 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i)
    if (std::equal(phrase.begin(), phrase.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) ++n;
  return n;
}

}  // namespace

void Lexicon::add(const std::string& term, Foundation f, double weight) {
  if (!(weight >= 0.0)) throw ValidationError("lexicon weight for '" + term + "' must be non-negative");
  const auto words = split_words(lower(term));
  if (words.empty()) throw ValidationError("empty lexicon term");
  std::string key;
  for (const auto& w : words) key += (key.empty() ? "" : " ") + w;
  entries_[key][static_cast<std::size_t>(f)] += weight;
  max_phrase_ = std::max(max_phrase_, words.size());
}

Lexicon Lexicon::parse(std::istream& in) {
  Lexicon lex;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || trim(line).front() == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string col; std::getline(ss, col, '\t');) cols.push_back(trim(col));
    if (number == 1 && cols.size() >= 1 && lower(cols[0]) == "term") continue;
    const std::string where = "lexicon line " + std::to_string(number);
    if (cols.size() != 3) throw ValidationError(where + ": expected 3 tab-separated columns");
    auto f = parse_foundation(cols[1]);
    if (!f) throw ValidationError(where + ": unknown foundation '" + cols[1] + "'");
    char* end = nullptr;
    const double w = std::strtod(cols[2].c_str(), &end);
    if (cols[2].empty() || *end != '\0') throw ValidationError(where + ": bad weight '" + cols[2] + "'");
    lex.add(cols[0], *f, w);
  }
  return lex;
}

Lexicon Lexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LookupError("cannot open lexicon '" + path.string() + "'");
  return parse(in);
}

Lexicon Lexicon::stemmed() const {
  Lexicon out;
  for (const auto& [term, contribution] : entries_) {
    std::string key;
    for (const auto& w : stem_all(split_words(term))) key += (key.empty() ? "" : " ") + w;
    for (std::size_t f = 0; f < kFoundationCount; ++f)
      if (contribution[f] > 0.0) out.add(key, static_cast<Foundation>(f), contribution[f]);
  }
  return out;
}

std::string stem(std::string_view word) {
  std::string w(word);
  if (w.size() > 2 && w.ends_with("'s")) w.resize(w.size() - 2);
  if (w.size() <= 4) return w;
  const auto strip = [&w](std::size_t n) {
    if (w.size() - n >= 4) w.resize(w.size() - n);
    return w;
  };
  if (w.ends_with("ing")) return strip(3);
  if (w.ends_with("ed")) return strip(2);
  if (w.ends_with("ss")) return w;
  // "churches" -> "church" but "mandates" -> "mandate".
  if (w.ends_with("es")) {
    const std::string_view head(w.data(), w.size() - 2);
    if (head.ends_with('s') || head.ends_with('x') || head.ends_with('z') || head.ends_with("ch") ||
        head.ends_with("sh"))
      return strip(2);
  }
  if (w.ends_with('s')) return strip(1);
  return w;
}

std::vector<std::string> stem_all(const std::vector<std::string>& tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(stem(t));
  return out;
}

std::filesystem::path default_lexicon_path() {
  if (const char* env = std::getenv("MEVIR_LEXICON"); env && *env) return env;
  return std::filesystem::path(MEVIR_DATA_DIR) / "lexicon.tsv";
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  const auto flush = [&] {
    while (!cur.empty() && cur.back() == '\'') cur.pop_back();
    if (!cur.empty()) out.push_back(cur);
    cur.clear();
  };
  for (char raw : text) {
    const auto c = static_cast<unsigned char>(raw);
    if (std::isalnum(c)) cur += static_cast<char>(std::tolower(c));
    else if (c == '\'' && !cur.empty()) cur += '\'';
    else flush();
  }
  flush();
  return out;
}

FoundationScores score_foundations(const std::vector<std::string>& tokens, const Lexicon& lexicon) {
  if (lexicon.empty()) throw ValidationError("lexicon is empty");
  FoundationScores out;
  std::map<std::string, std::size_t> counts;
  for (std::size_t i = 0; i < tokens.size();) {
    std::size_t matched = 0;
    for (std::size_t len = std::min(lexicon.max_phrase_length(), tokens.size() - i); len >= 1; --len) {
      std::string key = tokens[i];
      for (std::size_t k = 1; k < len; ++k) key += " " + tokens[i + k];
      if (lexicon.entries().contains(key)) {
        ++counts[key];
        matched = len;
        break;
      }
    }
    i += matched ? matched : 1;
  }
  double total = 0.0;
  for (const auto& [term, count] : counts) {
    const auto& c = lexicon.entries().at(term);
    LexiconHit hit{term, count, {}};
    for (std::size_t f = 0; f < kFoundationCount; ++f) {
      hit.contribution[f] = c[f] * static_cast<double>(count);
      out.raw[f] += hit.contribution[f];
      total += hit.contribution[f];
    }
    out.hits.push_back(std::move(hit));
  }
  if (total > 0.0) out.profile = EmftProfile::normalized(out.raw);
  return out;
}

const std::vector<TribeTemplate>& bundled_templates() {
  using F = Foundation;
  using M = MacDomain;
  using A = AnchorKind;
  static const std::vector<TribeTemplate> templates = {
      {"sovereignty_purity",
       emft({{F::Liberty, 0.5}, {F::Purity, 0.3}, {F::Care, 0.2}}),
       mac({M::Property, M::Deference}),
       {A::Belief, A::AcceptedAuthority},
       {"dissident doctors", "alternative media", "personal networks"},
       {"disgust", "anger", "pride in resistance"}},
      {"community_health",
       emft({{F::Care, 0.4}, {F::FairnessEquity, 0.3}, {F::Authority, 0.3}}),
       mac({M::Kin, M::Group, M::Reciprocity}),
       {A::AcceptedAuthority, A::PreTrusted},
       {"health agencies", "medical journals", "epidemiologists"},
       {"empathy", "solidarity", "moral duty", "shame at free-riding"}},
      {"economic_liberty",
       emft({{F::Liberty, 0.4}, {F::Loyalty, 0.3}, {F::FairnessProportionality, 0.3}}),
       mac({M::Property, M::Group, M::Fairness}),
       {A::AcceptedAuthority, A::Belief},
       {"pro-growth economists", "industry", "nationalist politicians"},
       {"fear of decline", "pride in industry", "resentment of elites"}},
      {"global_responsibility",
       emft({{F::Care, 0.35}, {F::FairnessEquity, 0.25}, {F::Authority, 0.2}, {F::Liberty, 0.2}}),
       mac({M::Kin, M::Group, M::Reciprocity, M::Fairness}),
       {A::AcceptedAuthority, A::PreTrusted},
       {"climate scientists", "assessment bodies", "environmental NGOs"},
       {"fear for vulnerable and future kin", "guilt", "hope in collective action"}},
      {"doomer",
       emft({{F::Care, 0.5}, {F::Liberty, 0.3}, {F::Purity, 0.2}}),
       mac({M::Kin, M::Group}),
       {A::AcceptedAuthority, A::EvidenceExhaustion},
       {"AI safety researchers", "existential-risk philosophers", "technical whistleblowers"},
       {"fear", "dread", "urgency", "valorization of restraint"}},
      {"accelerationist",
       emft({{F::Care, 0.3}, {F::Liberty, 0.3}, {F::FairnessEquity, 0.2}, {F::Authority, 0.2}}),
       mac({M::Group, M::Heroism}),
       {A::AcceptedAuthority, A::Belief},
       {"tech entrepreneurs", "engineers", "techno-optimist writers"},
       {"hope", "excitement", "pride", "caution framed as harmful delay"}},
  };
  return templates;
}

const TribeTemplate& find_template(std::string_view name) {
  for (const auto& t : bundled_templates())
    if (t.name == name) return t;
  throw LookupError("unknown tribe template '" + std::string(name) + "'");
}

std::vector<TribeMatch> match_tribe(const EmftProfile& profile, const std::vector<TribeTemplate>& templates) {
  if (templates.empty()) throw ValidationError("match_tribe needs at least one template");
  std::vector<TribeMatch> out;
  for (const auto& t : templates) out.push_back({t.name, 2.0 * half_l1(profile, t.emft)});
  std::sort(out.begin(), out.end(), [](const TribeMatch& a, const TribeMatch& b) {
    return a.distance != b.distance ? a.distance < b.distance : a.name < b.name;
  });
  return out;
}

const std::vector<CueRule>& bundled_cue_rules() {
  using C = CueCategory;
  using A = AnchorKind;
  using M = MacDomain;
  static const std::vector<CueRule> rules = {
      // Level 1: which kind of truth maker the text leans on (heuristic).
      {"anecdote", 1, C::Anecdote,
       {"my friend", "my son", "my daughter", "my neighbor", "i know someone", "happened to me", "personally",
        "i saw", "story", "stories", "anecdote", "testimony", "firsthand"},
       "anecdotal truth maker", {}, {}},
      {"statistic", 1, C::Statistic,
       {"data", "percent", "statistics", "statistical", "trial", "trials", "study", "studies", "rate", "rates",
        "benchmark", "benchmarks", "gdp", "survey", "measured", "evidence shows"},
       "statistical truth maker", {}, {}},
      // Level 2: where justification stops.
      {"authority_citation", 2, C::Authority,
       {"according to", "experts", "scientists", "doctors", "researchers", "journal", "journals", "agency",
        "agencies", "peer reviewed", "ceo", "ceos", "founders", "economists", "epidemiologists", "professor"},
       "cites an authority", A::AcceptedAuthority, {}},
      {"unconditional_belief", 2, C::Authority,
       {"everyone knows", "obviously", "common sense", "i believe", "we all know", "undeniable"},
       "asserted without support", A::Belief, {}},
      {"sacred_premise", 2, C::Authority, {"sacred", "self evident", "god given", "inalienable"},
       "pre-trusted premise", A::PreTrusted, {}},
      {"evidence_limit", 2, C::Authority, {"no one can know", "unknowable", "we may never know", "no way to tell"},
       "evidence declared exhausted", A::EvidenceExhaustion, {}},
      {"effort_limit", 2, C::Authority, {"too complicated", "no time to", "who has time", "don't need to read"},
       "search cut short", A::ResourceExhaustion, {}},
      // Level 3: bias cues.
      {"bandwagon", 3, C::Bias,
       {"everyone is", "millions of", "join the", "the majority", "trending", "join us", "movement"},
       "crowd appeal (bandwagon)", {}, {}},
      {"halo", 3, C::Bias, {"visionary", "genius", "famous", "celebrity", "legendary", "brilliant founder"},
       "prestige transfer (halo)", {}, {}},
      {"reactance", 3, C::Bias, {"mandate", "mandates", "forced", "forcing", "they want you to", "compulsory", "coerced"},
       "resistance to directives (reactance)", {}, {}},
      {"overconfidence", 3, C::Bias, {"i know for a fact", "certainly", "without a doubt", "trust me", "any fool"},
       "overconfidence", {}, {}},
      {"confirmation", 3, C::Bias, {"as we always said", "proves what", "confirms what", "just as we predicted"},
       "seeks validation (confirmation)", {}, {}},
      {"availability", 3, C::Bias, {"shocking", "horrifying", "terrifying", "imagine", "nightmare", "apocalyptic"},
       "vivid imagery (availability)", {}, {}},
      {"asymmetric_attribution", 3, C::Bias,
       {"luddites", "greedy", "reckless", "malicious", "evil", "traitors", "sheep", "corrupt"},
       "dispositional blame of an out-group", {}, {}},
      // Level 4: cooperative games.
      {"kin", 4, C::Cooperation, {"family", "families", "children", "grandchildren", "kin", "our kids", "future generations"},
       "kin", {}, M::Kin},
      {"mutualism", 4, C::Cooperation,
       {"together", "community", "humanity", "collective", "shared prosperity", "everyone gains", "collaboration",
        "our nation", "our people"},
       "mutualism / group", {}, M::Group},
      {"reciprocity", 4, C::Cooperation, {"fair share", "in return", "give back", "do my part", "free riders", "owe"},
       "reciprocity", {}, M::Reciprocity},
      {"heroism", 4, C::Cooperation,
       {"hero", "heroes", "heroic", "brave", "bold", "frontier", "promethean", "courage", "pioneers"},
       "heroism", {}, M::Heroism},
      {"deference", 4, C::Cooperation, {"obey", "submit", "hierarchy", "chain of command", "elders"},
       "deference", {}, M::Deference},
      {"fairness", 4, C::Cooperation, {"fair", "unfair", "equal share", "divide", "earned", "deserve"},
       "fairness", {}, M::Fairness},
      {"property", 4, C::Cooperation,
       {"property", "my body", "ownership", "our land", "possession", "own body", "private"},
       "property / possession", {}, M::Property},
      {"pathogen", 4, C::Cooperation, {"contamination", "poison", "toxic", "infection", "disease", "impure"},
       "pathogen avoidance", {}, M::Pathogen},
  };
  return rules;
}

ProfileReport analyze(std::string_view document, const Lexicon& lexicon, const std::vector<TribeTemplate>& templates,
                      const std::vector<CueRule>& rules, bool use_stemming) {
  ProfileReport report;
  const auto tokens = use_stemming ? stem_all(tokenize(document)) : tokenize(document);
  report.token_count = tokens.size();
  report.foundations = score_foundations(tokens, use_stemming ? lexicon.stemmed() : lexicon);

  MacProfile::Values mac_raw{};
  double mac_total = 0.0;
  for (const auto& rule : rules) {
    FiredRule fired{rule.id, rule.level, rule.note, {}, 0, rule.anchor_guess, rule.mac_domain};
    for (const auto& p : rule.patterns) {
      const auto words = split_words(p);
      const std::size_t n = count_phrase(tokens, use_stemming ? stem_all(words) : words);
      if (n == 0) continue;
      fired.matched.push_back(p);
      fired.count += n;
    }
    if (fired.count == 0) continue;
    if (rule.mac_domain) {
      mac_raw[static_cast<std::size_t>(*rule.mac_domain)] += static_cast<double>(fired.count);
      mac_total += static_cast<double>(fired.count);
    }
    switch (rule.category) {
      case CueCategory::Anecdote:
      case CueCategory::Statistic: report.truth_maker_cues.push_back(std::move(fired)); break;
      case CueCategory::Authority: report.anchor_cues.push_back(std::move(fired)); break;
      case CueCategory::Bias: report.bias_flags.push_back(std::move(fired)); break;
      case CueCategory::Cooperation: report.cooperation_cues.push_back(std::move(fired)); break;
    }
  }
  if (mac_total > 0.0) report.mac = MacProfile::normalized(mac_raw);

  if (report.foundations.profile) {
    const auto& raw = report.foundations.raw;
    report.dominant_framing = static_cast<Foundation>(std::max_element(raw.begin(), raw.end()) - raw.begin());
    if (!templates.empty()) report.matches = match_tribe(*report.foundations.profile, templates);
  } else {
    report.no_signal = true;
  }
  return report;
}

namespace {

nlohmann::ordered_json fired_json(const std::vector<FiredRule>& rules) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& r : rules) {
    nlohmann::ordered_json j;
    j["rule"] = r.id;
    j["note"] = r.note;
    j["count"] = r.count;
    j["matched"] = r.matched;
    if (r.anchor_guess) j["anchor_guess"] = std::string(to_string(*r.anchor_guess));
    if (r.mac_domain) j["mac_domain"] = std::string(to_string(*r.mac_domain));
    arr.push_back(std::move(j));
  }
  return arr;
}

template <typename Index, std::size_t N>
nlohmann::ordered_json profile_json(const Distribution<Index, N>& d) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < N; ++i) j[std::string(to_string(static_cast<Index>(i)))] = d.at(i);
  return j;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::fixed << v;
  return os.str();
}

void text_rules(std::ostringstream& os, const std::vector<FiredRule>& rules) {
  if (rules.empty()) os << "    (none)\n";
  for (const auto& r : rules) {
    os << "    - " << r.id << ": " << r.note << " x" << r.count;
    if (r.anchor_guess) os << " -> " << to_string(*r.anchor_guess);
    os << " [";
    for (std::size_t i = 0; i < r.matched.size(); ++i) os << (i ? ", " : "") << r.matched[i];
    os << "]\n";
  }
}

}  // namespace

std::string report_to_json(const ProfileReport& report, int indent) {
  nlohmann::ordered_json j;
  j["heuristic"] = "levels 1-3 are cue-term heuristics";
  j["tokens"] = report.token_count;
  j["no_signal"] = report.no_signal;
  auto& l1 = j["level1"];
  l1["dominant_framing"] = report.dominant_framing ? nlohmann::ordered_json(std::string(to_string(*report.dominant_framing)))
                                                   : nlohmann::ordered_json(nullptr);
  l1["truth_maker_cues"] = fired_json(report.truth_maker_cues);
  j["level2"]["anchor_cues"] = fired_json(report.anchor_cues);
  j["level3"]["bias_flags"] = fired_json(report.bias_flags);
  auto& l4 = j["level4"];
  nlohmann::ordered_json raw = nlohmann::ordered_json::object();
  for (std::size_t f = 0; f < kFoundationCount; ++f)
    raw[std::string(to_string(static_cast<Foundation>(f)))] = report.foundations.raw[f];
  l4["foundation_scores"] = raw;
  l4["emft_profile"] = report.foundations.profile ? profile_json(*report.foundations.profile)
                                                  : nlohmann::ordered_json::object();
  auto hits = nlohmann::ordered_json::array();
  for (const auto& h : report.foundations.hits) {
    nlohmann::ordered_json hj;
    hj["term"] = h.term;
    hj["count"] = h.count;
    for (std::size_t f = 0; f < kFoundationCount; ++f)
      if (h.contribution[f] > 0.0) hj["contribution"][std::string(to_string(static_cast<Foundation>(f)))] = h.contribution[f];
    hits.push_back(std::move(hj));
  }
  l4["lexicon_hits"] = hits;
  l4["cooperation_cues"] = fired_json(report.cooperation_cues);
  l4["mac_profile"] = report.mac ? profile_json(*report.mac) : nlohmann::ordered_json::object();
  auto matches = nlohmann::ordered_json::array();
  for (const auto& m : report.matches) matches.push_back({{"tribe", m.name}, {"distance", m.distance}});
  l4["tribe_matches"] = matches;
  return j.dump(indent);
}

std::string report_to_text(const ProfileReport& report) {
  std::ostringstream os;
  os << "Profile report (" << report.token_count << " tokens; levels 1-3 are cue-term heuristics)\n";
  if (report.no_signal) os << "NO SIGNAL: no lexicon terms matched\n";
  os << "Level 1  ontological unpacking\n";
  os << "  dominant framing: "
     << (report.dominant_framing ? std::string(to_string(*report.dominant_framing)) : std::string("none")) << "\n";
  os << "  truth-maker cues:\n";
  text_rules(os, report.truth_maker_cues);
  os << "Level 2  procedural trust elaboration\n";
  os << "  anchor cues:\n";
  text_rules(os, report.anchor_cues);
  os << "Level 3  virtue-epistemic assessment\n";
  os << "  bias flags:\n";
  text_rules(os, report.bias_flags);
  os << "Level 4  moral modeling\n";
  os << "  foundation scores:\n";
  for (std::size_t f = 0; f < kFoundationCount; ++f) {
    os << "    " << to_string(static_cast<Foundation>(f)) << ": " << fmt(report.foundations.raw[f]);
    if (report.foundations.profile) os << " (" << fmt(report.foundations.profile->at(f)) << ")";
    os << "\n";
  }
  os << "  lexicon hits:";
  if (report.foundations.hits.empty()) os << " (none)";
  for (const auto& h : report.foundations.hits) os << (&h == &report.foundations.hits.front() ? " " : ", ") << h.term << " (" << h.count << ")";
  os << "\n  cooperation cues:\n";
  text_rules(os, report.cooperation_cues);
  os << "  tribe matches:\n";
  if (report.matches.empty()) os << "    (none)\n";
  for (const auto& m : report.matches) os << "    " << m.name << "  " << fmt(m.distance) << "\n";
  return os.str();
}

}  // namespace mevir
