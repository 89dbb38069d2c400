#include "emocap/scene.hpp"

#include <algorithm>
#include <set>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "emocap/error.hpp"
#include "text_util.hpp"

namespace emocap {

std::string_view to_string(Sex sex) {
  switch (sex) {
    case Sex::male: return "male";
    case Sex::female: return "female";
    case Sex::unspecified: return "unspecified";
  }
  return "unspecified";
}

std::string_view to_string(AgeGroup age) {
  switch (age) {
    case AgeGroup::child: return "child";
    case AgeGroup::teenager: return "teenager";
    case AgeGroup::adult: return "adult";
    case AgeGroup::elderly: return "elderly";
  }
  return "adult";
}

Sex parse_sex(std::string_view text) {
  if (text == "male") return Sex::male;
  if (text == "female") return Sex::female;
  if (text == "unspecified") return Sex::unspecified;
  throw SchemaError("", "unknown sex '" + std::string(text) + "'");
}

AgeGroup parse_age_group(std::string_view text) {
  if (text == "child") return AgeGroup::child;
  if (text == "teenager") return AgeGroup::teenager;
  if (text == "adult") return AgeGroup::adult;
  if (text == "elderly") return AgeGroup::elderly;
  throw SchemaError("", "unknown age group '" + std::string(text) + "'");
}

std::string_view to_string(SceneType type) {
  return type == SceneType::one_person ? "one_person" : "multiple_people";
}

std::string_view to_string(ViolationCode code) {
  switch (code) {
    case ViolationCode::empty_scene_id: return "EmptySceneId";
    case ViolationCode::no_persons: return "NoPersons";
    case ViolationCode::empty_person_key: return "EmptyPersonKey";
    case ViolationCode::duplicate_person_key: return "DuplicatePersonKey";
    case ViolationCode::unknown_category: return "UnknownCategory";
    case ViolationCode::signal_not_in_category: return "SignalNotInCategory";
    case ViolationCode::duplicate_signal: return "DuplicateSignal";
    case ViolationCode::empty_social_identity: return "EmptySocialIdentity";
    case ViolationCode::empty_environment: return "EmptyEnvironment";
    case ViolationCode::empty_action: return "EmptyAction";
    case ViolationCode::malformed_placeholder: return "MalformedPlaceholder";
    case ViolationCode::unknown_placeholder: return "UnknownPlaceholder";
    case ViolationCode::empty_descriptor: return "EmptyDescriptor";
    case ViolationCode::possessive_in_relation: return "PossessiveInRelation";
    case ViolationCode::unknown_judgment_label: return "UnknownJudgmentLabel";
    case ViolationCode::judgment_for_unknown_person: return "JudgmentForUnknownPerson";
  }
  return "Unknown";
}

Sex Interaction::other_sex() const {
  return std::visit([](const auto& o) { return o.sex; }, other);
}

const PersonAnnotation* SceneAnnotation::find_person(std::string_view key) const {
  for (const auto& p : persons) {
    if (p.person_key == key) return &p;
  }
  return nullptr;
}

SceneType SceneAnnotation::type() const {
  if (persons.size() == 1 && persons.front().interactions.empty()) return SceneType::one_person;
  return SceneType::multiple_people;
}

std::optional<std::vector<std::string>> action_placeholders(std::string_view action) {
  std::vector<std::string> names;
  std::size_t i = 0;
  while (i < action.size()) {
    char c = action[i];
    if (c == '}') return std::nullopt;
    if (c != '{') {
      ++i;
      continue;
    }
    auto close = action.find_first_of("{}", i + 1);
    if (close == std::string_view::npos || action[close] != '}') return std::nullopt;
    names.emplace_back(action.substr(i + 1, close - i - 1));
    i = close + 1;
  }
  return names;
}

namespace {

// Matches the caption engine's cleaning, which drops trailing full stops.
bool blank(const std::string& s) {
  return detail::trim(s).find_first_not_of(". \t\r\n") == std::string_view::npos;
}

bool has_possessive_marker(std::string_view relation) {
  std::string_view r = detail::trim(relation);
  return r.starts_with("'s ") || r.starts_with("' ") || r.starts_with("\xE2\x80\x99") ||
         r.ends_with("'s") || r.ends_with("'");
}

class ViolationSink {
 public:
  void add(ViolationCode code, std::string path, std::string message) {
    out_.push_back({code, std::move(path), std::move(message)});
  }
  std::vector<Violation> take() { return std::move(out_); }

 private:
  std::vector<Violation> out_;
};

void check_person(const PersonAnnotation& person, const std::string& base,
                  const SignalLexicon& lexicon, ViolationSink& sink) {
  if (blank(person.person_key)) {
    sink.add(ViolationCode::empty_person_key, base + ".person_key", "person_key is empty");
  }
  if (person.social_identity && blank(*person.social_identity)) {
    sink.add(ViolationCode::empty_social_identity, base + ".social_identity",
             "social identity is present but empty");
  }
  if (person.environment && blank(*person.environment)) {
    sink.add(ViolationCode::empty_environment, base + ".environment",
             "environment is present but empty");
  }

  std::set<std::string> seen_signals;
  for (std::size_t i = 0; i < person.signals.size(); ++i) {
    const auto& sig = person.signals[i];
    const std::string path = base + ".signals[" + std::to_string(i) + "]";
    if (lexicon.find_category(sig.category) == nullptr) {
      sink.add(ViolationCode::unknown_category, path,
               "unknown signal category '" + sig.category + "'");
      continue;
    }
    if (lexicon.find_signal(sig.category, sig.phrase) == nullptr) {
      std::string message = "'" + sig.phrase + "' is not a " + sig.category + " signal";
      auto homes = lexicon.categories_of(sig.phrase);
      if (!homes.empty()) message += " (listed under " + homes.front() + ")";
      sink.add(ViolationCode::signal_not_in_category, path, std::move(message));
      continue;
    }
    if (!seen_signals.insert(signal_key(sig.phrase)).second) {
      sink.add(ViolationCode::duplicate_signal, path, "signal '" + sig.phrase + "' repeated");
    }
  }

  for (std::size_t i = 0; i < person.interactions.size(); ++i) {
    const auto& inter = person.interactions[i];
    const std::string path = base + ".interactions[" + std::to_string(i) + "]";
    if (blank(inter.action)) {
      sink.add(ViolationCode::empty_action, path + ".action", "interaction action is empty");
    } else if (auto names = action_placeholders(inter.action); !names) {
      sink.add(ViolationCode::malformed_placeholder, path + ".action",
               "unbalanced braces in action");
    } else {
      for (const auto& name : *names) {
        if (name != "subj" && name != "subj_pos") {
          sink.add(ViolationCode::unknown_placeholder, path + ".action",
                   "unknown placeholder {" + name + "}");
        }
      }
    }
    if (const auto* demo = std::get_if<Demographic>(&inter.other)) {
      if (blank(demo->descriptor)) {
        sink.add(ViolationCode::empty_descriptor, path + ".other.descriptor",
                 "demographic descriptor is empty");
      }
    } else {
      const auto& rel = std::get<Relationship>(inter.other);
      if (blank(rel.relation)) {
        sink.add(ViolationCode::empty_descriptor, path + ".other.relation",
                 "relationship is empty");
      } else if (has_possessive_marker(rel.relation)) {
        sink.add(ViolationCode::possessive_in_relation, path + ".other.relation",
                 "store the relation without the possessive marker");
      }
    }
  }
}

}  // namespace

std::vector<Violation> validate_scene(const SceneAnnotation& scene, const SignalLexicon& lexicon) {
  ViolationSink sink;
  if (blank(scene.scene_id)) sink.add(ViolationCode::empty_scene_id, "scene_id", "scene_id is empty");
  if (scene.persons.empty()) {
    sink.add(ViolationCode::no_persons, "persons", "a scene needs at least one person");
  }

  std::unordered_set<std::string> keys;
  for (std::size_t i = 0; i < scene.persons.size(); ++i) {
    const auto& person = scene.persons[i];
    const std::string base = "persons[" + std::to_string(i) + "]";
    if (!person.person_key.empty() && !keys.insert(person.person_key).second) {
      sink.add(ViolationCode::duplicate_person_key, base + ".person_key",
               "person_key '" + person.person_key + "' used twice");
    }
    check_person(person, base, lexicon, sink);
  }

  for (const auto& [key, label] : scene.emotion_judgment) {
    const std::string path = "emotion_judgment." + key;
    if (scene.find_person(key) == nullptr) {
      sink.add(ViolationCode::judgment_for_unknown_person, path,
               "judgment for unknown person '" + key + "'");
    }
    if (!lexicon.is_canonical(label)) {
      sink.add(ViolationCode::unknown_judgment_label, path,
               "'" + label + "' is not a canonical emotion label");
    }
  }
  return sink.take();
}

Resolution resolve_ground_truth(const Judgment& a, const Judgment& b) {
  if (a.scene_id != b.scene_id || a.person_key != b.person_key) {
    throw ReferenceError("judgments refer to different persons: " + a.scene_id + "/" +
                         a.person_key + " vs " + b.scene_id + "/" + b.person_key);
  }
  if (a.label == b.label) return GroundTruthSample{a.scene_id, a.person_key, a.label};
  auto order = [](const Judgment& j) { return std::tie(j.annotator_id, j.label); };
  const bool swap = order(b) < order(a);
  return Disagreement{a.scene_id, a.person_key, swap ? b : a, swap ? a : b};
}

const LabelCounts* DatasetStatistics::row(std::string_view label) const {
  for (const auto& r : rows) {
    if (r.label == label) return &r;
  }
  return nullptr;
}

DatasetStatistics dataset_statistics(std::span<const GroundTruthSample> samples,
                                     std::span<const SceneAnnotation> scenes,
                                     const SignalLexicon& lexicon) {
  DatasetStatistics stats;
  std::unordered_map<std::string, std::size_t> row_of;
  for (const auto& name : lexicon.label_names()) {
    row_of.emplace(name, stats.rows.size());
    stats.rows.push_back({name, 0, 0});
  }
  std::unordered_map<std::string, const SceneAnnotation*> scene_of;
  for (const auto& scene : scenes) scene_of.emplace(scene.scene_id, &scene);

  for (const auto& sample : samples) {
    auto s = scene_of.find(sample.scene_id);
    if (s == scene_of.end()) {
      throw ReferenceError("ground truth references unknown scene '" + sample.scene_id + "'");
    }
    if (s->second->find_person(sample.person_key) == nullptr) {
      throw ReferenceError("ground truth references unknown person '" + sample.person_key +
                           "' in scene '" + sample.scene_id + "'");
    }
    auto r = row_of.find(sample.label);
    if (r == row_of.end()) {
      throw ReferenceError("ground truth label '" + sample.label + "' is not canonical");
    }
    auto& row = stats.rows[r->second];
    if (s->second->type() == SceneType::one_person) {
      ++row.one_person;
      ++stats.one_person_total;
    } else {
      ++row.multiple_people;
      ++stats.multiple_people_total;
    }
  }
  return stats;
}

}  // namespace emocap
