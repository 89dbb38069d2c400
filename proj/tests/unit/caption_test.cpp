#include <gtest/gtest.h>

#include <random>

#include "emocap/caption.hpp"
#include "emocap/error.hpp"
#include "fixtures.hpp"

using namespace emocap;
using fx::passenger_scene;

namespace {

CaptionOptions typeset() {
  CaptionOptions o;
  o.apostrophe = ApostropheStyle::typographic;
  return o;
}

std::size_t sentence_count(const std::string& text) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '.' && (i + 1 == text.size() || text[i + 1] == ' ')) ++n;
  }
  return n;
}

bool is_subsequence(const std::vector<std::string>& part, const std::vector<std::string>& whole) {
  std::size_t j = 0;
  for (const auto& s : whole) {
    if (j < part.size() && part[j] == s) ++j;
  }
  return j == part.size();
}

}  // namespace

TEST(CaptionGolden, FullCaption) {
  const Caption c = render(passenger_scene(), "red", CaptionVariant::full, NamePool::defaults(), typeset());
  EXPECT_EQ(c.text, fx::kPassengerFull);
  EXPECT_EQ(c.subject_name(), "Sean");
}

TEST(CaptionGolden, MinusInteractions) {
  EXPECT_EQ(render(passenger_scene(), "red", CaptionVariant::minus_interactions, NamePool::defaults(),
                   typeset()).text,
            fx::kPassengerMinusInteractions);
}

TEST(CaptionGolden, MinusEnvironments) {
  EXPECT_EQ(render(passenger_scene(), "red", CaptionVariant::minus_environments, NamePool::defaults(),
                   typeset()).text,
            fx::kPassengerMinusEnvironments);
}

TEST(Caption, AsciiApostropheByDefault) {
  const Caption c = render(passenger_scene(), "red", CaptionVariant::full, NamePool::defaults());
  EXPECT_NE(c.text.find("Sean's chair"), std::string::npos);
  EXPECT_EQ(c.text.find("\xE2\x80\x99"), std::string::npos);
}

TEST(Caption, NameAssignmentCoversSubjectAndPartners) {
  const Caption c = render(passenger_scene(), "red", CaptionVariant::full, NamePool::defaults());
  EXPECT_EQ(c.name_assignment.at("red"), "Sean");
  EXPECT_EQ(c.name_assignment.at(interaction_name_key("red", 0)), "Mia");
}

TEST(Caption, PinnedNamesAreHonouredAndReserved) {
  SceneAnnotation s = passenger_scene();
  s.persons[0].display_name = "Mia";
  s.persons[0].sex = Sex::female;
  const Caption c = render(s, "red", CaptionVariant::full, NamePool::defaults());
  EXPECT_EQ(c.subject_name(), "Mia");
  EXPECT_EQ(c.name_assignment.at("red#0"), "Beth");
  s.persons[0].interactions[0].other_name = "Grandma Jo";
  const Caption pinned = render(s, "red", CaptionVariant::full, NamePool::defaults());
  EXPECT_NE(pinned.text.find("Grandma Jo is a child"), std::string::npos);
}

TEST(Caption, UnspecifiedSexAndRelationship) {
  SceneAnnotation s = passenger_scene();
  s.persons[0].sex = Sex::unspecified;
  s.persons[0].age = AgeGroup::elderly;
  s.persons[0].interactions[0].other = Relationship{"mother", Sex::unspecified};
  s.persons[0].interactions[0].action = "holding {subj_pos} hand.";
  const Caption c = render(s, "red", CaptionVariant::full, NamePool::defaults());
  EXPECT_EQ(c.text,
            "Alex is an elderly. Alex is a(n) passenger. Alex is or has raising eyebrows, "
            "side-eyeing. Sam is Alex's mother and they are holding Alex's hand. Alex's physical "
            "environment is on an airplane.");
}

TEST(Caption, ResolvedArticlesAndAgeWords) {
  SceneAnnotation s = passenger_scene();
  s.persons[0].social_identity = "engineer";
  s.persons[0].interactions[0].other = Demographic{"elderly woman", AgeGroup::elderly, Sex::female};
  CaptionOptions o;
  o.resolve_articles = true;
  o.age_words[AgeGroup::adult] = "grown-up";
  const Caption c = render(s, "red", CaptionVariant::full, NamePool::defaults(), o);
  EXPECT_NE(c.text.find("Sean is a male grown-up."), std::string::npos);
  EXPECT_NE(c.text.find("Sean is an engineer."), std::string::npos);
  EXPECT_NE(c.text.find("Mia is an elderly woman and she is"), std::string::npos);
}

TEST(Caption, OmittedPartsProduceNoSentence) {
  SceneAnnotation s = passenger_scene();
  s.persons[0].social_identity.reset();
  s.persons[0].signals.clear();
  s.persons[0].environment.reset();
  s.persons[0].interactions.clear();
  EXPECT_EQ(render(s, "red", CaptionVariant::full, NamePool::defaults()).text, "Sean is a male adult.");
}

TEST(Caption, PossessiveRules) {
  EXPECT_EQ(possessive("Sean"), "Sean's");
  EXPECT_EQ(possessive("Lucas"), "Lucas'");
  EXPECT_EQ(possessive("Sean", ApostropheStyle::typographic), "Sean\xE2\x80\x99s");
  EXPECT_THROW(possessive(""), RenderError);
}

TEST(Caption, UnknownPersonThrows) {
  EXPECT_THROW(render(passenger_scene(), "blue", CaptionVariant::full, NamePool::defaults()), RenderError);
}

TEST(Caption, ExhaustedPoolThrows) {
  NamePool tiny{{"Sean"}, {"Mia"}, {"Alex"}};
  SceneAnnotation s = passenger_scene();
  s.persons[0].interactions.push_back(s.persons[0].interactions[0]);
  EXPECT_THROW(render(s, "red", CaptionVariant::full, tiny), RenderError);
}

TEST(Caption, NamePoolValidation) {
  EXPECT_NO_THROW(NamePool::defaults().validate());
  EXPECT_THROW((NamePool{{"Sean"}, {"Sean"}, {"Alex"}}.validate()), SchemaError);
  EXPECT_THROW((NamePool{{}, {"Mia"}, {"Alex"}}.validate()), SchemaError);
}

TEST(Caption, VariantNames) {
  for (CaptionVariant v : kAllVariants) EXPECT_EQ(parse_variant(to_string(v)), v);
  EXPECT_EQ(display_name(CaptionVariant::minus_environments), "Minus Environments");
  EXPECT_THROW(parse_variant("minus-signals"), SchemaError);
}

// Variant containment and sentence counts over random scenes.
TEST(CaptionProperty, AblationsAreSubsetsOfFull) {
  const SignalLexicon& lex = default_lexicon();
  std::vector<SignalRef> all;
  for (const auto& c : lex.categories()) {
    for (const auto& s : c.signals) all.push_back({c.name, s});
  }
  std::mt19937 rng(11);
  auto coin = [&] { return std::uniform_int_distribution<int>(0, 1)(rng) == 1; };
  for (int trial = 0; trial < 300; ++trial) {
    SceneAnnotation s;
    s.scene_id = "t" + std::to_string(trial);
    PersonAnnotation p;
    p.person_key = "red";
    p.sex = static_cast<Sex>(std::uniform_int_distribution<int>(0, 2)(rng));
    p.age = static_cast<AgeGroup>(std::uniform_int_distribution<int>(0, 3)(rng));
    if (coin()) p.social_identity = "teacher";
    const int nsig = std::uniform_int_distribution<int>(0, 3)(rng);
    std::shuffle(all.begin(), all.end(), rng);
    p.signals.assign(all.begin(), all.begin() + nsig);
    const int ninter = std::uniform_int_distribution<int>(0, 3)(rng);
    for (int i = 0; i < ninter; ++i) {
      p.interactions.push_back({"", Demographic{"man", AgeGroup::adult, Sex::male}, "waving at {subj}"});
    }
    if (coin()) p.environment = "in a park";
    s.persons.push_back(p);
    ASSERT_TRUE(validate_scene(s, lex).empty());

    const NamePool pool = NamePool::defaults();
    const auto full = render_sentences(s, "red", CaptionVariant::full, pool);
    const auto mi = render_sentences(s, "red", CaptionVariant::minus_interactions, pool);
    const auto me = render_sentences(s, "red", CaptionVariant::minus_environments, pool);
    const std::size_t expected = 1 + (p.social_identity ? 1 : 0) + (nsig > 0 ? 1 : 0) +
                                 std::size_t(ninter) + (p.environment ? 1 : 0);
    EXPECT_EQ(full.size(), expected);
    EXPECT_EQ(mi.size(), expected - std::size_t(ninter));
    EXPECT_EQ(me.size(), expected - (p.environment ? 1 : 0));
    // Ablated variants keep the remaining sentences in order.
    EXPECT_TRUE(is_subsequence(mi, full));
    EXPECT_TRUE(is_subsequence(me, full));
    const Caption c = render(s, "red", CaptionVariant::full, pool);
    EXPECT_EQ(sentence_count(c.text), expected);
  }
}

TEST(CaptionJson, RoundTrip) {
  const Caption c = render(passenger_scene(), "red", CaptionVariant::full, NamePool::defaults());
  EXPECT_EQ(nlohmann::json(c).get<Caption>(), c);
  CaptionOptions o = typeset();
  o.age_words[AgeGroup::elderly] = "senior";
  const nlohmann::json j = o;
  const CaptionOptions back = j.get<CaptionOptions>();
  EXPECT_EQ(back.apostrophe, o.apostrophe);
  EXPECT_EQ(back.age_word(AgeGroup::elderly), "senior");
}
