#include "emocap/scene_json.hpp"

#include "emocap/error.hpp"
#include "json_util.hpp"

namespace emocap {

using nlohmann::json;

namespace {

template <typename Fn>
auto with_path(const std::string& path, Fn&& fn) {
  try {
    return fn();
  } catch (const SchemaError& e) {
    if (e.field().empty()) throw SchemaError(path, e.what());
    throw;
  }
}

Sex sex_field(const json& j, std::string_view key, std::string_view path) {
  std::string text = detail::require_string(j, key, path);
  return with_path(detail::join_path(path, key), [&] { return parse_sex(text); });
}

AgeGroup age_field(const json& j, std::string_view key, std::string_view path) {
  std::string text = detail::require_string(j, key, path);
  return with_path(detail::join_path(path, key), [&] { return parse_age_group(text); });
}

std::optional<std::string> optional_text(const json& j, std::string_view key,
                                         std::string_view path) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw SchemaError(detail::join_path(path, key), "expected a string");
  return it->get<std::string>();
}

SignalRef parse_signal(const json& j, const std::string& path) {
  return {detail::require_string(j, "category", path), detail::require_string(j, "phrase", path)};
}

Interaction parse_interaction(const json& j, const std::string& path) {
  Interaction out;
  out.other_name = detail::optional_string(j, "other_name", path);
  out.action = detail::require_string(j, "action", path);
  const json& other = detail::require(j, "other", path);
  const std::string opath = path + ".other";
  const std::string kind = detail::require_string(other, "kind", opath);
  if (kind == "demographic") {
    out.other = Demographic{detail::require_string(other, "descriptor", opath),
                            age_field(other, "age", opath), sex_field(other, "sex", opath)};
  } else if (kind == "relationship") {
    out.other = Relationship{detail::require_string(other, "relation", opath),
                             sex_field(other, "sex", opath)};
  } else {
    throw SchemaError(opath + ".kind", "expected 'demographic' or 'relationship'");
  }
  return out;
}

PersonAnnotation parse_person(const json& j, const std::string& path) {
  PersonAnnotation p;
  p.person_key = detail::require_string(j, "person_key", path);
  p.display_name = detail::optional_string(j, "display_name", path);
  p.sex = sex_field(j, "sex", path);
  p.age = age_field(j, "age", path);
  p.social_identity = optional_text(j, "social_identity", path);
  p.environment = optional_text(j, "environment", path);
  if (auto it = j.find("signals"); it != j.end()) {
    if (!it->is_array()) throw SchemaError(path + ".signals", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      p.signals.push_back(parse_signal((*it)[i], detail::index_path(path + ".signals", i)));
    }
  }
  if (auto it = j.find("interactions"); it != j.end()) {
    if (!it->is_array()) throw SchemaError(path + ".interactions", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      p.interactions.push_back(
          parse_interaction((*it)[i], detail::index_path(path + ".interactions", i)));
    }
  }
  return p;
}

}  // namespace

void to_json(json& j, const SignalRef& v) { j = json{{"category", v.category}, {"phrase", v.phrase}}; }

void from_json(const json& j, SignalRef& v) { v = parse_signal(j, ""); }

void to_json(json& j, const Interaction& v) {
  json other;
  if (const auto* d = std::get_if<Demographic>(&v.other)) {
    other = json{{"kind", "demographic"},
                 {"descriptor", d->descriptor},
                 {"age", to_string(d->age)},
                 {"sex", to_string(d->sex)}};
  } else {
    const auto& r = std::get<Relationship>(v.other);
    other = json{{"kind", "relationship"}, {"relation", r.relation}, {"sex", to_string(r.sex)}};
  }
  j = json{{"other_name", v.other_name}, {"other", std::move(other)}, {"action", v.action}};
}

void from_json(const json& j, Interaction& v) { v = parse_interaction(j, ""); }

void to_json(json& j, const PersonAnnotation& v) {
  j = json{{"person_key", v.person_key},
           {"display_name", v.display_name},
           {"sex", to_string(v.sex)},
           {"age", to_string(v.age)},
           {"social_identity", v.social_identity ? json(*v.social_identity) : json(nullptr)},
           {"signals", v.signals},
           {"interactions", v.interactions},
           {"environment", v.environment ? json(*v.environment) : json(nullptr)}};
}

void from_json(const json& j, PersonAnnotation& v) { v = parse_person(j, ""); }

void to_json(json& j, const SceneAnnotation& v) {
  j = json{{"scene_id", v.scene_id},
           {"image_uri", v.image_uri},
           {"annotator_id", v.annotator_id},
           {"version", v.version},
           {"persons", v.persons},
           {"emotion_judgment", v.emotion_judgment}};
}

void from_json(const json& j, SceneAnnotation& v) {
  SceneAnnotation s;
  s.scene_id = detail::require_string(j, "scene_id", "");
  s.image_uri = detail::optional_string(j, "image_uri", "");
  s.annotator_id = detail::optional_string(j, "annotator_id", "");
  if (auto it = j.find("version"); it != j.end() && !it->is_null()) {
    if (!it->is_number_unsigned()) throw SchemaError("version", "expected a non-negative integer");
    s.version = it->get<std::uint64_t>();
  }
  const json& persons = detail::require_array(j, "persons", "");
  for (std::size_t i = 0; i < persons.size(); ++i) {
    s.persons.push_back(parse_person(persons[i], detail::index_path("persons", i)));
  }
  if (auto it = j.find("emotion_judgment"); it != j.end() && !it->is_null()) {
    if (!it->is_object()) throw SchemaError("emotion_judgment", "expected an object");
    for (const auto& [key, value] : it->items()) {
      if (!value.is_string()) throw SchemaError("emotion_judgment." + key, "expected a string");
      s.emotion_judgment.emplace(key, value.get<std::string>());
    }
  }
  v = std::move(s);
}

void to_json(json& j, const GroundTruthSample& v) {
  j = json{{"scene_id", v.scene_id}, {"person_key", v.person_key}, {"label", v.label}};
}

void from_json(const json& j, GroundTruthSample& v) {
  v = {detail::require_string(j, "scene_id", ""), detail::require_string(j, "person_key", ""),
       detail::require_string(j, "label", "")};
}

void to_json(json& j, const Judgment& v) {
  j = json{{"scene_id", v.scene_id},
           {"person_key", v.person_key},
           {"annotator_id", v.annotator_id},
           {"label", v.label}};
}

void from_json(const json& j, Judgment& v) {
  v = {detail::require_string(j, "scene_id", ""), detail::require_string(j, "person_key", ""),
       detail::require_string(j, "annotator_id", ""), detail::require_string(j, "label", "")};
}

void to_json(json& j, const Violation& v) {
  j = json{{"code", to_string(v.code)}, {"path", v.path}, {"message", v.message}};
}

void to_json(json& j, const DatasetStatistics& v) {
  json rows = json::array();
  for (const auto& r : v.rows) {
    rows.push_back({{"label", r.label},
                    {"one_person", r.one_person},
                    {"multiple_people", r.multiple_people},
                    {"total", r.total()}});
  }
  j = json{{"rows", std::move(rows)},
           {"one_person_total", v.one_person_total},
           {"multiple_people_total", v.multiple_people_total},
           {"total", v.total()}};
}

}  // namespace emocap
