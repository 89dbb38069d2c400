#include "emocap/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "emocap/error.hpp"
#include "json_util.hpp"
#include "text_util.hpp"

namespace emocap {

namespace detail {
std::string_view default_lexicon_text();
}

namespace {

constexpr std::array<std::string_view, 4> kCurlyQuotes{"\xE2\x80\x9C", "\xE2\x80\x9D",
                                                       "\xE2\x80\x98", "\xE2\x80\x99"};

bool strip_curly_prefix(std::string_view& s) {
  for (auto q : kCurlyQuotes) {
    if (s.starts_with(q)) {
      s.remove_prefix(q.size());
      return true;
    }
  }
  return false;
}

bool strip_curly_suffix(std::string_view& s) {
  for (auto q : kCurlyQuotes) {
    if (s.ends_with(q)) {
      s.remove_suffix(q.size());
      return true;
    }
  }
  return false;
}

bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

// A trailing ')' is kept when it closes a '(' inside the text, so
// "Pain/Suffering (emotional)." keeps its parenthesised qualifier.
bool strip_edge_punctuation(std::string_view& s) {
  bool changed = false;
  for (;;) {
    s = detail::trim(s);
    if (s.empty()) return changed;
    if (strip_curly_prefix(s) || strip_curly_suffix(s)) {
      changed = true;
      continue;
    }
    // "(Fear)" unwraps; "Pain (physical)" keeps its qualifier.
    if (s.size() >= 2 && s.front() == '(' && s.back() == ')' &&
        s.substr(1, s.size() - 2).find_first_of("()") == std::string_view::npos) {
      s = s.substr(1, s.size() - 2);
      changed = true;
      continue;
    }
    const auto opens = std::count(s.begin(), s.end(), '(');
    const auto closes = std::count(s.begin(), s.end(), ')');
    char front = s.front();
    if (is_punct(front) && !(front == '(' && closes >= opens)) {
      s.remove_prefix(1);
      changed = true;
      continue;
    }
    char back = s.back();
    if (is_punct(back) && !(back == ')' && opens >= closes)) {
      s.remove_suffix(1);
      changed = true;
      continue;
    }
    return changed;
  }
}

std::string capitalize_first(std::string s) {
  if (!s.empty()) s.front() = static_cast<char>(std::toupper(static_cast<unsigned char>(s.front())));
  return s;
}

bool is_known_category(std::string_view name) {
  return std::find(kSignalCategoryNames.begin(), kSignalCategoryNames.end(), name) !=
         kSignalCategoryNames.end();
}

}  // namespace

std::string label_key(std::string_view raw) {
  std::string_view s = raw;
  strip_edge_punctuation(s);
  return detail::to_lower_ascii(detail::collapse_whitespace(s));
}

std::string signal_key(std::string_view phrase) {
  return detail::to_lower_ascii(detail::collapse_whitespace(phrase));
}

SignalLexicon::SignalLexicon(std::string version, std::vector<EmotionLabel> labels,
                             std::vector<SignalCategory> categories)
    : version_(std::move(version)), labels_(std::move(labels)), categories_(std::move(categories)) {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    const auto& label = labels_[i];
    auto claim = [&](const std::string& spelling) {
      std::string key = label_key(spelling);
      if (key.empty()) {
        throw LexiconError("label '" + spelling + "' is empty after normalization");
      }
      auto [it, inserted] = label_index_.emplace(key, i);
      if (!inserted && it->second != i) {
        throw LexiconError("label spelling '" + spelling + "' collides with label '" +
                           labels_[it->second].canonical + "'");
      }
    };
    claim(label.canonical);
    for (const auto& alias : label.aliases) claim(alias);
  }

  std::unordered_set<std::string> seen_categories;
  for (const auto& category : categories_) {
    if (!is_known_category(category.name)) {
      throw LexiconError("unknown signal category '" + category.name + "'");
    }
    if (!seen_categories.insert(category.name).second) {
      throw LexiconError("category '" + category.name + "' listed more than once");
    }
    std::unordered_set<std::string> seen_signals;
    for (const auto& signal : category.signals) {
      std::string key = signal_key(signal);
      if (key.empty()) throw LexiconError("empty signal in category '" + category.name + "'");
      if (!seen_signals.insert(key).second) {
        throw LexiconError("duplicate signal '" + signal + "' in category '" + category.name + "'");
      }
    }
  }
}

std::vector<std::string> SignalLexicon::label_names() const {
  std::vector<std::string> names;
  names.reserve(labels_.size());
  for (const auto& label : labels_) names.push_back(label.canonical);
  return names;
}

bool SignalLexicon::is_canonical(std::string_view name) const {
  return std::any_of(labels_.begin(), labels_.end(),
                     [&](const EmotionLabel& l) { return l.canonical == name; });
}

const SignalCategory* SignalLexicon::find_category(std::string_view name) const {
  for (const auto& category : categories_) {
    if (category.name == name) return &category;
  }
  return nullptr;
}

const std::string* SignalLexicon::find_signal(std::string_view category,
                                              std::string_view phrase) const {
  const SignalCategory* c = find_category(category);
  if (c == nullptr) return nullptr;
  const std::string key = signal_key(phrase);
  for (const auto& signal : c->signals) {
    if (signal_key(signal) == key) return &signal;
  }
  return nullptr;
}

std::vector<std::string> SignalLexicon::categories_of(std::string_view phrase) const {
  std::vector<std::string> out;
  for (const auto& c : categories_) {
    if (find_signal(c.name, phrase) != nullptr) out.push_back(c.name);
  }
  return out;
}

std::size_t SignalLexicon::signal_count() const {
  std::size_t n = 0;
  for (const auto& c : categories_) n += c.signals.size();
  return n;
}

NormalizedLabel SignalLexicon::normalize(std::string_view raw) const {
  std::string key = label_key(raw);
  auto it = label_index_.find(key);
  if (it != label_index_.end()) return NormalizedLabel::canonical(labels_[it->second].canonical);
  return NormalizedLabel::out_of_list(capitalize_first(std::move(key)));
}

NormalizedLabel normalize_label(std::string_view raw, const SignalLexicon& lexicon) {
  return lexicon.normalize(raw);
}

SignalLexicon parse_lexicon(std::string_view json_text) {
  using detail::index_path;
  using detail::json;
  const json doc = detail::parse_json(json_text, "lexicon");
  if (!doc.is_object()) throw SchemaError("", "lexicon document must be an object");

  std::string version = detail::require_string(doc, "version", "");

  std::vector<EmotionLabel> labels;
  const json& jlabels = detail::require_array(doc, "labels", "");
  for (std::size_t i = 0; i < jlabels.size(); ++i) {
    const std::string path = index_path("labels", i);
    EmotionLabel label;
    label.canonical = detail::require_string(jlabels[i], "canonical", path);
    if (auto it = jlabels[i].find("aliases"); it != jlabels[i].end()) {
      if (!it->is_array()) throw SchemaError(path + ".aliases", "expected an array");
      for (std::size_t k = 0; k < it->size(); ++k) {
        if (!(*it)[k].is_string()) {
          throw SchemaError(index_path(path + ".aliases", k), "expected a string");
        }
        label.aliases.push_back((*it)[k].get<std::string>());
      }
    }
    labels.push_back(std::move(label));
  }

  std::vector<SignalCategory> categories;
  const json& jcats = detail::require_array(doc, "categories", "");
  for (std::size_t i = 0; i < jcats.size(); ++i) {
    const std::string path = index_path("categories", i);
    SignalCategory category;
    category.name = detail::require_string(jcats[i], "name", path);
    const json& jsignals = detail::require_array(jcats[i], "signals", path);
    for (std::size_t k = 0; k < jsignals.size(); ++k) {
      if (!jsignals[k].is_string()) {
        throw SchemaError(index_path(path + ".signals", k), "expected a string");
      }
      category.signals.push_back(jsignals[k].get<std::string>());
    }
    categories.push_back(std::move(category));
  }

  return SignalLexicon(std::move(version), std::move(labels), std::move(categories));
}

SignalLexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LexiconError("cannot open lexicon file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_lexicon(buf.str());
}

std::string serialize_lexicon(const SignalLexicon& lexicon) {
  nlohmann::ordered_json doc;
  doc["version"] = lexicon.version();
  doc["labels"] = nlohmann::ordered_json::array();
  for (const auto& label : lexicon.labels()) {
    nlohmann::ordered_json jl;
    jl["canonical"] = label.canonical;
    jl["aliases"] = label.aliases;
    doc["labels"].push_back(std::move(jl));
  }
  doc["categories"] = nlohmann::ordered_json::array();
  for (const auto& category : lexicon.categories()) {
    nlohmann::ordered_json jc;
    jc["name"] = category.name;
    jc["signals"] = category.signals;
    doc["categories"].push_back(std::move(jc));
  }
  return doc.dump(2) + "\n";
}

void save_lexicon(const SignalLexicon& lexicon, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LexiconError("cannot write lexicon file " + path.string());
  out << serialize_lexicon(lexicon);
  if (!out) throw LexiconError("failed writing lexicon file " + path.string());
}

std::string_view default_lexicon_json() { return detail::default_lexicon_text(); }

const SignalLexicon& default_lexicon() {
  static const SignalLexicon lexicon = parse_lexicon(default_lexicon_json());
  return lexicon;
}

}  // namespace emocap
