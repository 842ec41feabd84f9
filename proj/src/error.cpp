#include "ondiscuss/error.hpp"

namespace ondiscuss {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kEmptyCorpus: return "EmptyCorpus";
    case ErrorKind::kVocabTooSmall: return "VocabTooSmall";
    case ErrorKind::kDuplicateKeyword: return "DuplicateKeyword";
    case ErrorKind::kUnknownKeyword: return "UnknownKeyword";
    case ErrorKind::kDuplicateTopicName: return "DuplicateTopicName";
    case ErrorKind::kEmptyName: return "EmptyName";
    case ErrorKind::kPhraseTooLong: return "PhraseTooLong";
    case ErrorKind::kTopicIndexOutOfRange: return "TopicIndexOutOfRange";
    case ErrorKind::kValidation: return "Validation";
    case ErrorKind::kPipelineMismatch: return "PipelineMismatch";
    case ErrorKind::kMixedCodebookVersions: return "MixedCodebookVersions";
    case ErrorKind::kNoNonzeroUnits: return "NoNonzeroUnits";
    case ErrorKind::kUnknownStudent: return "UnknownStudent";
    case ErrorKind::kAuthFailed: return "AuthFailed";
    case ErrorKind::kCourseNotFound: return "CourseNotFound";
    case ErrorKind::kRateLimited: return "RateLimited";
    case ErrorKind::kMalformedPayload: return "MalformedPayload";
    case ErrorKind::kUpstream: return "Upstream";
    case ErrorKind::kBadHeader: return "BadHeader";
    case ErrorKind::kBadRow: return "BadRow";
    case ErrorKind::kMissingAssignment: return "MissingAssignment";
    case ErrorKind::kNotFound: return "NotFound";
    case ErrorKind::kVersionConflict: return "VersionConflict";
    case ErrorKind::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace ondiscuss
