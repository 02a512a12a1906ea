#include "meshmark/errors.hpp"

namespace meshmark {

const char* to_string(ParseErrorKind kind) {
  switch (kind) {
    case ParseErrorKind::kIo: return "io";
    case ParseErrorKind::kBadHeader: return "bad header";
    case ParseErrorKind::kBadCounts: return "bad counts";
    case ParseErrorKind::kBadVertex: return "bad vertex";
    case ParseErrorKind::kNonFiniteCoordinate: return "non-finite coordinate";
    case ParseErrorKind::kNonTriangleFace: return "non-triangle face";
    case ParseErrorKind::kIndexOutOfRange: return "index out of range";
    case ParseErrorKind::kRepeatedIndex: return "repeated index";
    case ParseErrorKind::kUnexpectedEnd: return "unexpected end of input";
    case ParseErrorKind::kEmptyMesh: return "empty mesh";
    case ParseErrorKind::kBadConfig: return "bad config";
  }
  return "unknown";
}

std::string ParseError::format(ParseErrorKind kind, std::size_t line, const std::string& what) {
  std::string msg = to_string(kind);
  if (line > 0) msg = "line " + std::to_string(line) + ": " + msg;
  if (!what.empty()) msg += ": " + what;
  return msg;
}

}  // namespace meshmark
