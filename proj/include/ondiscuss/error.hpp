#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ondiscuss {

enum class ErrorKind {
  // topic_model
  kEmptyCorpus,
  kVocabTooSmall,
  // codebook
  kDuplicateKeyword,
  kUnknownKeyword,
  kDuplicateTopicName,
  kEmptyName,
  kPhraseTooLong,
  kTopicIndexOutOfRange,
  kValidation,
  // coder / ena
  kPipelineMismatch,
  kMixedCodebookVersions,
  kNoNonzeroUnits,
  kUnknownStudent,
  // ingestion
  kAuthFailed,
  kCourseNotFound,
  kRateLimited,
  kMalformedPayload,
  kUpstream,
  kBadHeader,
  kBadRow,
  kMissingAssignment,
  // storage
  kNotFound,
  kVersionConflict,
  kIo,
};

std::string_view to_string(ErrorKind kind);

/// All library failures are reported as Error with a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A rejected codebook edit batch; one entry per failing edit or violated
/// invariant.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(ErrorKind::kValidation, join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (const auto& s : v) out += (out.empty() ? "" : "; ") + s;
    return out;
  }
  std::vector<std::string> violations_;
};

}  // namespace ondiscuss
