#include "emocap/caption.hpp"

#include <set>

#include "emocap/error.hpp"
#include "emocap/scene_json.hpp"
#include "json_util.hpp"
#include "text_util.hpp"

namespace emocap {

using nlohmann::json;

std::string_view to_string(CaptionVariant variant) {
  switch (variant) {
    case CaptionVariant::full: return "full";
    case CaptionVariant::minus_interactions: return "minus-interactions";
    case CaptionVariant::minus_environments: return "minus-environments";
  }
  return "full";
}

std::string_view display_name(CaptionVariant variant) {
  switch (variant) {
    case CaptionVariant::full: return "Full Caption";
    case CaptionVariant::minus_interactions: return "Minus Interactions";
    case CaptionVariant::minus_environments: return "Minus Environments";
  }
  return "Full Caption";
}

CaptionVariant parse_variant(std::string_view text) {
  for (auto v : kAllVariants) {
    if (text == to_string(v)) return v;
  }
  throw SchemaError("variant", "unknown caption variant '" + std::string(text) +
                                   "' (expected full, minus-interactions or minus-environments)");
}

NamePool NamePool::defaults() {
  return NamePool{
      {"Sean", "Jack", "Lucas", "Terry", "Karl", "Ben", "Owen", "Noah", "Liam", "Ethan", "Ryan",
       "Adam", "Henry", "Leo", "Oscar", "Felix", "Hugo", "Mark", "Paul", "Victor"},
      {"Mia", "Beth", "Zoe", "Jane", "Chloe", "Emma", "Grace", "Lily", "Nora", "Ruby", "Clara",
       "Ella", "Hannah", "Ivy", "Julia", "Kate", "Laura", "Rose", "Sara", "Tess"},
      {"Alex", "Sam", "Jordan", "Taylor", "Casey", "Riley", "Morgan", "Jamie", "Quinn", "Avery",
       "Robin", "Drew", "Kai", "Rowan", "Sky", "Charlie", "Dana", "Eden", "Jesse", "Reese"}};
}

void NamePool::validate() const {
  if (male.empty() || female.empty() || neutral.empty()) {
    throw SchemaError("names", "every name pool needs at least one name");
  }
  std::set<std::string> seen;
  for (const auto* pool : {&male, &female, &neutral}) {
    for (const auto& name : *pool) {
      if (detail::trim(name).empty()) throw SchemaError("names", "empty name in pool");
      if (!seen.insert(name).second) {
        throw SchemaError("names", "name '" + name + "' appears in more than one slot");
      }
    }
  }
}

void to_json(json& j, const NamePool& v) {
  j = json{{"male", v.male}, {"female", v.female}, {"neutral", v.neutral}};
}

void from_json(const json& j, NamePool& v) {
  NamePool p;
  auto list = [&](const char* key, std::vector<std::string>& out) {
    const json& arr = detail::require_array(j, key, "names");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_string()) throw SchemaError(detail::index_path(std::string("names.") + key, i), "expected a string");
      out.push_back(arr[i].get<std::string>());
    }
  };
  list("male", p.male);
  list("female", p.female);
  list("neutral", p.neutral);
  p.validate();
  v = std::move(p);
}

std::string interaction_name_key(std::string_view person_key, std::size_t index) {
  return std::string(person_key) + "#" + std::to_string(index);
}

namespace {

const std::vector<std::string>& pool_for(const NamePool& pool, Sex sex) {
  switch (sex) {
    case Sex::male: return pool.male;
    case Sex::female: return pool.female;
    case Sex::unspecified: return pool.neutral;
  }
  return pool.neutral;
}

std::string next_name(const NamePool& pool, Sex sex, std::set<std::string>& used,
                      std::string_view who) {
  for (const auto& name : pool_for(pool, sex)) {
    if (used.insert(name).second) return name;
  }
  throw RenderError("name pool exhausted for " + std::string(to_string(sex)) + " name (" +
                    std::string(who) + ")");
}

std::string article_for(std::string_view word) {
  return detail::starts_with_vowel_sound(word) ? "an" : "a";
}

// Free text is whitespace-collapsed and loses a trailing full stop so that
// every sentence ends with exactly one ".".
std::string clean_fragment(std::string_view text) {
  std::string out = detail::collapse_whitespace(text);
  while (!out.empty() && out.back() == '.') out.pop_back();
  while (!out.empty() && detail::is_space(out.back())) out.pop_back();
  return out;
}

std::string_view pronoun_phrase(Sex sex) {
  switch (sex) {
    case Sex::male: return "he is";
    case Sex::female: return "she is";
    case Sex::unspecified: return "they are";
  }
  return "they are";
}

std::string substitute_placeholders(std::string_view action, const std::string& subject,
                                    ApostropheStyle style) {
  auto names = action_placeholders(action);
  if (!names) throw RenderError("unbalanced braces in action '" + std::string(action) + "'");
  std::string out;
  std::size_t i = 0;
  while (i < action.size()) {
    if (action[i] != '{') {
      out.push_back(action[i++]);
      continue;
    }
    auto close = action.find('}', i);
    std::string_view name = action.substr(i + 1, close - i - 1);
    if (name == "subj") {
      out += subject;
    } else if (name == "subj_pos") {
      out += possessive(subject, style);
    } else {
      throw RenderError("unresolved placeholder {" + std::string(name) + "}");
    }
    i = close + 1;
  }
  return out;
}

std::string join_signals(const std::vector<SignalRef>& signals) {
  std::string out;
  for (const auto& s : signals) {
    if (!out.empty()) out += ", ";
    out += detail::to_lower_ascii(detail::collapse_whitespace(s.phrase));
  }
  return out;
}

}  // namespace

NameAssignment assign_names(const SceneAnnotation& scene, const NamePool& pool) {
  std::set<std::string> used;
  for (const auto& p : scene.persons) {
    if (!p.display_name.empty()) used.insert(p.display_name);
    for (const auto& inter : p.interactions) {
      if (!inter.other_name.empty()) used.insert(inter.other_name);
    }
  }

  NameAssignment names;
  for (const auto& p : scene.persons) {
    names[p.person_key] = p.display_name.empty()
                              ? next_name(pool, p.sex, used, "person '" + p.person_key + "'")
                              : p.display_name;
  }
  for (const auto& p : scene.persons) {
    for (std::size_t i = 0; i < p.interactions.size(); ++i) {
      const auto& inter = p.interactions[i];
      const std::string key = interaction_name_key(p.person_key, i);
      names[key] = inter.other_name.empty() ? next_name(pool, inter.other_sex(), used, key)
                                            : inter.other_name;
    }
  }
  return names;
}

std::string CaptionOptions::age_word(AgeGroup age) const {
  if (auto it = age_words.find(age); it != age_words.end()) return it->second;
  return std::string(to_string(age));
}

void to_json(json& j, const CaptionOptions& v) {
  json ages = json::object();
  for (const auto& [age, word] : v.age_words) ages[std::string(to_string(age))] = word;
  j = json{{"resolve_articles", v.resolve_articles},
           {"apostrophe", v.apostrophe == ApostropheStyle::ascii ? "ascii" : "typographic"},
           {"age_words", std::move(ages)}};
}

void from_json(const json& j, CaptionOptions& v) {
  CaptionOptions o;
  if (auto it = j.find("resolve_articles"); it != j.end()) {
    if (!it->is_boolean()) throw SchemaError("caption.resolve_articles", "expected a boolean");
    o.resolve_articles = it->get<bool>();
  }
  const std::string style = detail::optional_string(j, "apostrophe", "caption", "ascii");
  if (style == "ascii") {
    o.apostrophe = ApostropheStyle::ascii;
  } else if (style == "typographic") {
    o.apostrophe = ApostropheStyle::typographic;
  } else {
    throw SchemaError("caption.apostrophe", "expected 'ascii' or 'typographic'");
  }
  if (auto it = j.find("age_words"); it != j.end()) {
    if (!it->is_object()) throw SchemaError("caption.age_words", "expected an object");
    for (const auto& [key, word] : it->items()) {
      if (!word.is_string()) throw SchemaError("caption.age_words." + key, "expected a string");
      AgeGroup age;
      try {
        age = parse_age_group(key);
      } catch (const SchemaError&) {
        throw SchemaError("caption.age_words." + key, "unknown age group");
      }
      o.age_words[age] = word.get<std::string>();
    }
  }
  v = std::move(o);
}

std::string possessive(std::string_view name, ApostropheStyle style) {
  if (name.empty()) throw RenderError("possessive of an empty name");
  const std::string_view mark = style == ApostropheStyle::ascii ? "'" : "\xE2\x80\x99";
  std::string out(name);
  out += mark;
  if (name.back() != 's' && name.back() != 'S') out += 's';
  return out;
}

const std::string& Caption::subject_name() const {
  auto it = name_assignment.find(person_key);
  if (it == name_assignment.end()) throw RenderError("caption has no name for its subject");
  return it->second;
}

void to_json(json& j, const Caption& v) {
  j = json{{"scene_id", v.scene_id},
           {"person_key", v.person_key},
           {"variant", to_string(v.variant)},
           {"text", v.text},
           {"name_assignment", v.name_assignment}};
}

void from_json(const json& j, Caption& v) {
  Caption c;
  c.scene_id = detail::require_string(j, "scene_id", "");
  c.person_key = detail::require_string(j, "person_key", "");
  c.variant = parse_variant(detail::require_string(j, "variant", ""));
  c.text = detail::require_string(j, "text", "");
  if (auto it = j.find("name_assignment"); it != j.end()) {
    c.name_assignment = it->get<NameAssignment>();
  }
  v = std::move(c);
}

PersonAnnotation ablate(const PersonAnnotation& person, CaptionVariant variant) {
  PersonAnnotation out = person;
  if (variant == CaptionVariant::minus_interactions) out.interactions.clear();
  if (variant == CaptionVariant::minus_environments) out.environment.reset();
  return out;
}

std::vector<std::string> render_sentences(const SceneAnnotation& scene,
                                          std::string_view person_key, CaptionVariant variant,
                                          const NamePool& pool, const CaptionOptions& options) {
  const PersonAnnotation* found = scene.find_person(person_key);
  if (found == nullptr) {
    throw RenderError("scene '" + scene.scene_id + "' has no person '" + std::string(person_key) +
                      "'");
  }
  const NameAssignment names = assign_names(scene, pool);
  const PersonAnnotation person = ablate(*found, variant);
  const std::string& name = names.at(person.person_key);
  const ApostropheStyle style = options.apostrophe;

  std::vector<std::string> sentences;

  const std::string age = options.age_word(person.age);
  if (person.sex == Sex::unspecified) {
    sentences.push_back(name + " is " + article_for(age) + " " + age + ".");
  } else {
    sentences.push_back(name + " is a " + std::string(to_string(person.sex)) + " " + age + ".");
  }

  if (person.social_identity) {
    const std::string identity = clean_fragment(*person.social_identity);
    if (!identity.empty()) {
      const std::string article = options.resolve_articles ? article_for(identity) : "a(n)";
      sentences.push_back(name + " is " + article + " " + identity + ".");
    }
  }

  if (!person.signals.empty()) {
    sentences.push_back(name + " is or has " + join_signals(person.signals) + ".");
  }

  for (std::size_t i = 0; i < person.interactions.size(); ++i) {
    const auto& inter = person.interactions[i];
    const std::string& other = names.at(interaction_name_key(person.person_key, i));
    const std::string action = clean_fragment(substitute_placeholders(inter.action, name, style));
    std::string sentence = other + " is ";
    if (const auto* demo = std::get_if<Demographic>(&inter.other)) {
      const std::string descriptor = clean_fragment(demo->descriptor);
      sentence += (options.resolve_articles ? article_for(descriptor) : "a") + " " + descriptor;
    } else {
      sentence += possessive(name, style) + " " +
                  clean_fragment(std::get<Relationship>(inter.other).relation);
    }
    sentence += " and " + std::string(pronoun_phrase(inter.other_sex())) + " " + action + ".";
    sentences.push_back(std::move(sentence));
  }

  if (person.environment) {
    const std::string environment = clean_fragment(*person.environment);
    if (!environment.empty()) {
      sentences.push_back(possessive(name, style) + " physical environment is " + environment +
                          ".");
    }
  }
  return sentences;
}

Caption render(const SceneAnnotation& scene, std::string_view person_key, CaptionVariant variant,
               const NamePool& pool, const CaptionOptions& options) {
  const auto sentences = render_sentences(scene, person_key, variant, pool, options);
  Caption caption;
  caption.scene_id = scene.scene_id;
  caption.person_key = std::string(person_key);
  caption.variant = variant;
  for (const auto& s : sentences) {
    if (!caption.text.empty()) caption.text.push_back(' ');
    caption.text += s;
  }

  const NameAssignment all = assign_names(scene, pool);
  caption.name_assignment[caption.person_key] = all.at(caption.person_key);
  const PersonAnnotation* person = scene.find_person(person_key);
  for (std::size_t i = 0; i < person->interactions.size(); ++i) {
    const std::string key = interaction_name_key(person_key, i);
    caption.name_assignment[key] = all.at(key);
  }
  return caption;
}

}  // namespace emocap
