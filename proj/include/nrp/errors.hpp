#ifndef NRP_ERRORS_HPP_
#define NRP_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <utility>

namespace nrp {

// Error taxonomy shared by the library and the CLI. category() is a stable
// token used for machine-readable diagnostics and exit codes.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& m) : Error("validation", m) {}
};

// Raised when interaction rewriting produces an unsatisfiable constraint,
// e.g. an exclusion folded inside a single merged node.
class ContradictionError : public Error {
 public:
  explicit ContradictionError(const std::string& m) : Error("contradiction", m) {}
};

class CycleError : public Error {
 public:
  explicit CycleError(const std::string& m) : Error("cycle", m) {}
};

class PartitionError : public Error {
 public:
  explicit PartitionError(const std::string& m) : Error("partition", m) {}
};

class ResourceError : public Error {
 public:
  explicit ResourceError(const std::string& m) : Error("resource", m) {}
};

// Enumeration refusals for instances too large for the exhaustive solvers.
class SizeGuardError : public Error {
 public:
  explicit SizeGuardError(const std::string& m) : Error("size_guard", m) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& m) : Error("domain", m) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& m) : Error("parse", m) {}
};

class GenerationError : public Error {
 public:
  explicit GenerationError(const std::string& m) : Error("generation", m) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error("io", m) {}
};

}  // namespace nrp

#endif  // NRP_ERRORS_HPP_
