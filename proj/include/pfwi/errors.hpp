#pragma once

#include <stdexcept>
#include <string>

namespace pfwi {

/// Coarse classification used by the CLI to pick an exit code.
enum class ErrorKind { Validation, Numerical, Io };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

#define PFWI_DEFINE_ERROR(Name, Kind)                                      \
  class Name : public Error {                                              \
   public:                                                                 \
    explicit Name(const std::string& what) : Error(ErrorKind::Kind, what) {} \
  };

// material / inputs
PFWI_DEFINE_ERROR(NonPhysical, Validation)
PFWI_DEFINE_ERROR(DomainError, Validation)
PFWI_DEFINE_ERROR(ParseError, Validation)
PFWI_DEFINE_ERROR(ValidationError, Validation)
PFWI_DEFINE_ERROR(GeometryMismatch, Validation)
PFWI_DEFINE_ERROR(OutOfDomain, Validation)
PFWI_DEFINE_ERROR(CadenceMismatch, Validation)
PFWI_DEFINE_ERROR(MissingForwardRun, Validation)

// numerics
PFWI_DEFINE_ERROR(NodeCollision, Numerical)
PFWI_DEFINE_ERROR(SingularPencil, Numerical)
PFWI_DEFINE_ERROR(SignViolation, Numerical)
PFWI_DEFINE_ERROR(Instability, Numerical)
PFWI_DEFINE_ERROR(DecayViolation, Numerical)

// file formats
PFWI_DEFINE_ERROR(IoError, Io)
PFWI_DEFINE_ERROR(MagicMismatch, Io)
PFWI_DEFINE_ERROR(VersionUnsupported, Io)
PFWI_DEFINE_ERROR(TruncatedFile, Io)

#undef PFWI_DEFINE_ERROR

}  // namespace pfwi
