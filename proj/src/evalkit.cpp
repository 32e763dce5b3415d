#include "rti/evalkit.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rti::evalkit {

namespace {

using nlohmann::json;

const char* kind_name(EvalErrorKind k) {
  switch (k) {
    case EvalErrorKind::EmptyIssueSet:
      return "EmptyIssueSet";
    case EvalErrorKind::UnlabeledIssue:
      return "UnlabeledIssue";
    case EvalErrorKind::InvalidLabel:
      return "InvalidLabel";
  }
  return "EvalError";
}

}  // namespace

EvalError::EvalError(EvalErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(kind_name(kind)) + ": " + detail), kind_(kind) {}

std::string_view to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::under_translation:
      return "under_translation";
    case ErrorCategory::over_translation:
      return "over_translation";
    case ErrorCategory::mistranslation:
      return "mistranslation";
    case ErrorCategory::incorrect_modification:
      return "incorrect_modification";
    case ErrorCategory::unclear_logic:
      return "unclear_logic";
  }
  return "mistranslation";
}

ErrorCategory category_from_string(std::string_view name) {
  for (ErrorCategory c : kAllCategories)
    if (to_string(c) == name) return c;
  throw EvalError(EvalErrorKind::InvalidLabel, "unknown error category: " + std::string(name));
}

std::string_view to_string(ErroneousSide side) {
  switch (side) {
    case ErroneousSide::rti:
      return "rti";
    case ErroneousSide::container:
      return "container";
    case ErroneousSide::both:
      return "both";
  }
  return "both";
}

ErroneousSide side_from_string(std::string_view name) {
  if (name == "rti") return ErroneousSide::rti;
  if (name == "container") return ErroneousSide::container;
  if (name == "both") return ErroneousSide::both;
  throw EvalError(EvalErrorKind::InvalidLabel, "unknown erroneous side: " + std::string(name));
}

EvalLabels EvalLabels::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open labels file: " + path.string());
  json doc = json::parse(in);
  EvalLabels labels;
  for (const auto& [issue_id, entry] : doc.at("labels").items()) {
    IssueLabel label;
    label.is_error = entry.at("is_error").get<bool>();
    if (entry.contains("categories"))
      for (const json& c : entry.at("categories"))
        label.categories.insert(category_from_string(c.get<std::string>()));
    if (entry.contains("erroneous_side"))
      label.erroneous_side = side_from_string(entry.at("erroneous_side").get<std::string>());
    if (label.is_error != !label.categories.empty())
      throw EvalError(EvalErrorKind::InvalidLabel,
                      "issue " + issue_id + ": categories must be non-empty iff is_error");
    if (label.is_error && !label.erroneous_side)
      throw EvalError(EvalErrorKind::InvalidLabel,
                      "issue " + issue_id + ": erroneous issues need an erroneous_side");
    labels.by_issue.emplace(issue_id, std::move(label));
  }
  return labels;
}

const IssueLabel& EvalLabels::require(const std::string& issue_id) const {
  auto it = by_issue.find(issue_id);
  if (it == by_issue.end()) throw EvalError(EvalErrorKind::UnlabeledIssue, issue_id);
  return it->second;
}

PrecisionResult precision(const EvalLabels& labels,
                          std::span<const detector::IssueRecord> issues) {
  if (issues.empty())
    throw EvalError(EvalErrorKind::EmptyIssueSet, "precision is undefined over zero issues");
  PrecisionResult result;
  result.total_count = static_cast<int>(issues.size());
  for (const detector::IssueRecord& issue : issues)
    if (labels.require(issue.issue_id).is_error) ++result.true_count;
  result.precision = static_cast<double>(result.true_count) / result.total_count;
  return result;
}

UniqueTranslations unique_erroneous_translations(const EvalLabels& labels,
                                                 std::span<const detector::IssueRecord> issues) {
  std::set<std::pair<std::string, std::string>> distinct;
  for (const detector::IssueRecord& issue : issues) {
    const IssueLabel& label = labels.require(issue.issue_id);
    if (!label.is_error) continue;
    switch (*label.erroneous_side) {
      case ErroneousSide::rti:
        distinct.emplace(issue.rti_text, issue.rti_translation);
        break;
      case ErroneousSide::container:
        distinct.emplace(issue.container_text, issue.container_translation);
        break;
      case ErroneousSide::both:
        distinct.emplace(issue.rti_text, issue.rti_translation);
        distinct.emplace(issue.container_text, issue.container_translation);
        break;
    }
  }
  UniqueTranslations out;
  out.listing.assign(distinct.begin(), distinct.end());
  out.count = static_cast<int>(out.listing.size());
  return out;
}

std::map<ErrorCategory, int> category_tally(const EvalLabels& labels) {
  std::map<ErrorCategory, int> tally;
  for (ErrorCategory c : kAllCategories) tally[c] = 0;
  for (const auto& [issue_id, label] : labels.by_issue)
    for (ErrorCategory c : label.categories) ++tally[c];
  return tally;
}

std::vector<SweepRow> threshold_sweep(std::span<const extract::RtiPair> pairs,
                                      std::span<const gateway::Translation> rti_translations,
                                      std::span<const gateway::Translation> container_translations,
                                      std::span<const int> d_values, detector::TokenizationMode mode,
                                      const EvalLabels* labels) {
  if (d_values.empty()) throw std::invalid_argument("threshold sweep needs at least one d value");
  for (int d : d_values)
    if (d < 0) throw std::invalid_argument("threshold values must be non-negative");

  std::vector<SweepRow> rows;
  rows.reserve(d_values.size());
  for (int d : d_values) {
    std::vector<detector::SuspiciousIssue> issues =
        detector::detect_all(pairs, rti_translations, container_translations, d, mode);
    SweepRow row;
    row.threshold = d;
    row.suspicious_count = static_cast<int>(issues.size());
    if (labels != nullptr && !issues.empty()) {
      int erroneous = 0;
      for (const detector::SuspiciousIssue& issue : issues)
        if (labels->require(detector::issue_id(issue.rti_translation, issue.container_translation))
                .is_error)
          ++erroneous;
      row.erroneous_count = erroneous;
      row.precision = static_cast<double>(erroneous) / row.suspicious_count;
    }
    rows.push_back(row);
  }
  return rows;
}

std::string sweep_to_csv(std::span<const SweepRow> rows) {
  std::ostringstream out;
  out << "d,suspicious_count,erroneous_count,precision\n";
  for (const SweepRow& row : rows) {
    out << row.threshold << ',' << row.suspicious_count << ',';
    if (row.erroneous_count) out << *row.erroneous_count;
    out << ',';
    if (row.precision) {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.4f", *row.precision);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace rti::evalkit
