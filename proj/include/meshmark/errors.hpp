#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace meshmark {

// Base class for every error raised by the library. The CLI maps each
// subclass onto a stable exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ParseErrorKind {
  kIo,
  kBadHeader,
  kBadCounts,
  kBadVertex,
  kNonFiniteCoordinate,
  kNonTriangleFace,
  kIndexOutOfRange,
  kRepeatedIndex,
  kUnexpectedEnd,
  kEmptyMesh,
  kBadConfig,
};

const char* to_string(ParseErrorKind kind);

class ParseError : public Error {
 public:
  ParseError(ParseErrorKind kind, std::size_t line, const std::string& what)
      : Error(format(kind, line, what)), kind_(kind), line_(line), detail_(what) {}

  ParseErrorKind kind() const { return kind_; }
  // 1-based line number of the offending record, 0 when not applicable.
  std::size_t line() const { return line_; }
  const std::string& detail() const { return detail_; }

 private:
  static std::string format(ParseErrorKind kind, std::size_t line, const std::string& what);

  ParseErrorKind kind_;
  std::size_t line_;
  std::string detail_;
};

// Structurally invalid or degenerate mesh (bad indices, coincident vertices...).
class MeshError : public Error {
 public:
  using Error::Error;
};

// Key material invalid or payload does not fit the mesh.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Malformed attack descriptor or out-of-range attack parameters.
class AttackSpecError : public Error {
 public:
  using Error::Error;
};

// Topology unsupported by an operation (e.g. non-manifold edge for Loop).
class TopologyError : public Error {
 public:
  using Error::Error;
};

}  // namespace meshmark
