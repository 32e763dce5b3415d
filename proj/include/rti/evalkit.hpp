#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rti/detector.hpp"

// Evaluation over detector output: precision from human labels,
// deduplicated erroneous-translation counts, per-category tallies and
// threshold sweeps.
namespace rti::evalkit {

enum class ErrorCategory {
  under_translation,
  over_translation,
  mistranslation,
  incorrect_modification,
  unclear_logic,
};

constexpr ErrorCategory kAllCategories[] = {
    ErrorCategory::under_translation,    ErrorCategory::over_translation,
    ErrorCategory::mistranslation,       ErrorCategory::incorrect_modification,
    ErrorCategory::unclear_logic,
};

std::string_view to_string(ErrorCategory category);
ErrorCategory category_from_string(std::string_view name);

enum class ErroneousSide { rti, container, both };

std::string_view to_string(ErroneousSide side);
ErroneousSide side_from_string(std::string_view name);

struct IssueLabel {
  bool is_error = false;
  std::set<ErrorCategory> categories;       // non-empty iff is_error
  std::optional<ErroneousSide> erroneous_side;  // present iff is_error
};

enum class EvalErrorKind { EmptyIssueSet, UnlabeledIssue, InvalidLabel };

class EvalError : public std::runtime_error {
 public:
  EvalError(EvalErrorKind kind, const std::string& detail);
  EvalErrorKind kind() const { return kind_; }

 private:
  EvalErrorKind kind_;
};

// Human verdicts, keyed by stable issue id. JSON file:
//   {"labels": {"<issue_id>": {"is_error": true,
//                              "categories": ["under_translation"],
//                              "erroneous_side": "rti"}, ...}}
struct EvalLabels {
  std::map<std::string, IssueLabel> by_issue;

  static EvalLabels load(const std::filesystem::path& path);
  const IssueLabel& require(const std::string& issue_id) const;
};

struct PrecisionResult {
  int true_count = 0;
  int total_count = 0;
  double precision = 0.0;  // true_count / total_count
};

PrecisionResult precision(const EvalLabels& labels,
                          std::span<const detector::IssueRecord> issues);

// Distinct (source text, target text) translations on the labeled
// erroneous side(s); a translation shared by several issues counts once.
struct UniqueTranslations {
  int count = 0;
  std::vector<std::pair<std::string, std::string>> listing;  // (source, target), sorted
};

UniqueTranslations unique_erroneous_translations(const EvalLabels& labels,
                                                 std::span<const detector::IssueRecord> issues);

// Issues per category; an issue with two categories increments both.
std::map<ErrorCategory, int> category_tally(const EvalLabels& labels);

struct SweepRow {
  int threshold = 0;
  int suspicious_count = 0;
  std::optional<int> erroneous_count;   // present when labels supplied
  std::optional<double> precision;
};

// Re-runs detection per threshold over the same pairs + translations.
std::vector<SweepRow> threshold_sweep(std::span<const extract::RtiPair> pairs,
                                      std::span<const gateway::Translation> rti_translations,
                                      std::span<const gateway::Translation> container_translations,
                                      std::span<const int> d_values, detector::TokenizationMode mode,
                                      const EvalLabels* labels = nullptr);

std::string sweep_to_csv(std::span<const SweepRow> rows);

}  // namespace rti::evalkit
