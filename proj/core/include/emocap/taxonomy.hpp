#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace emocap {

/// The six body-part groupings used to organise physical signals.
inline constexpr std::array<std::string_view, 6> kSignalCategoryNames{
    "Eyes", "Mouth", "Facial", "Body", "Hands", "Feet"};

struct EmotionLabel {
  std::string canonical;
  std::vector<std::string> aliases;

  bool operator==(const EmotionLabel&) const = default;
};

struct SignalCategory {
  std::string name;
  std::vector<std::string> signals;

  bool operator==(const SignalCategory&) const = default;
};

/// Either one of the lexicon's canonical labels or free text that matched
/// none of them. Out-of-list values keep the cleaned completion with an
/// initial capital.
class NormalizedLabel {
 public:
  NormalizedLabel() = default;

  static NormalizedLabel canonical(std::string name) { return {std::move(name), true}; }
  static NormalizedLabel out_of_list(std::string text) { return {std::move(text), false}; }

  bool in_list() const noexcept { return in_list_; }
  const std::string& text() const noexcept { return text_; }

  auto operator<=>(const NormalizedLabel&) const = default;

 private:
  NormalizedLabel(std::string text, bool in_list) : text_(std::move(text)), in_list_(in_list) {}

  std::string text_;
  bool in_list_ = false;
};

/// Immutable after construction; safe to share between threads.
class SignalLexicon {
 public:
  SignalLexicon() = default;

  /// Validates every invariant and throws LexiconError on violation.
  SignalLexicon(std::string version, std::vector<EmotionLabel> labels,
                std::vector<SignalCategory> categories);

  const std::string& version() const noexcept { return version_; }
  const std::vector<EmotionLabel>& labels() const noexcept { return labels_; }
  const std::vector<SignalCategory>& categories() const noexcept { return categories_; }

  /// Canonical label names in lexicon order.
  std::vector<std::string> label_names() const;
  bool is_canonical(std::string_view name) const;

  const SignalCategory* find_category(std::string_view name) const;

  /// Looks up a phrase within one category, ignoring case and repeated
  /// whitespace. Returns the phrase as stored in the lexicon.
  const std::string* find_signal(std::string_view category, std::string_view phrase) const;

  /// Names of every category that contains the phrase.
  std::vector<std::string> categories_of(std::string_view phrase) const;

  std::size_t signal_count() const;

  NormalizedLabel normalize(std::string_view raw) const;

  friend bool operator==(const SignalLexicon& a, const SignalLexicon& b) {
    return a.version_ == b.version_ && a.labels_ == b.labels_ && a.categories_ == b.categories_;
  }

 private:
  std::string version_;
  std::vector<EmotionLabel> labels_;
  std::vector<SignalCategory> categories_;
  // label_key -> index into labels_
  std::unordered_map<std::string, std::size_t> label_index_;
};

/// Cleaning rule shared by label matching: trims whitespace and surrounding
/// punctuation, lowercases ASCII and collapses internal whitespace.
std::string label_key(std::string_view raw);

/// Lowercase + whitespace collapse. Used for signal phrase identity.
std::string signal_key(std::string_view phrase);

NormalizedLabel normalize_label(std::string_view raw, const SignalLexicon& lexicon);

SignalLexicon parse_lexicon(std::string_view json_text);
SignalLexicon load_lexicon(const std::filesystem::path& path);

/// Two-space indented JSON with LF line endings and a trailing newline.
std::string serialize_lexicon(const SignalLexicon& lexicon);
void save_lexicon(const SignalLexicon& lexicon, const std::filesystem::path& path);

/// The 153-signal lexicon compiled into the library.
const SignalLexicon& default_lexicon();
std::string_view default_lexicon_json();

}  // namespace emocap
