#pragma once

#include <stdexcept>
#include <string>

namespace actirehab {

// Broad failure classes; the CLI maps these onto process exit codes.
enum class ErrorClass { Validation, Usage, Numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorClass cls, std::string code, const std::string& message);

    ErrorClass error_class() const noexcept { return class_; }
    // Stable machine-readable name, e.g. "NonMonotonicTime".
    const std::string& code() const noexcept { return code_; }
    // The message without the code prefix.
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorClass class_;
    std::string code_;
    std::string detail_;
};

#define ACTIREHAB_DEFINE_ERROR(Name, Class)                                   \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& message)                             \
            : Error(ErrorClass::Class, #Name, message) {}                     \
    };

// ingest
ACTIREHAB_DEFINE_ERROR(MissingFile, Validation)
ACTIREHAB_DEFINE_ERROR(MalformedRow, Validation)
ACTIREHAB_DEFINE_ERROR(InvariantViolation, Validation)
ACTIREHAB_DEFINE_ERROR(NonMonotonicTime, Validation)
ACTIREHAB_DEFINE_ERROR(ParseError, Validation)
ACTIREHAB_DEFINE_ERROR(IoError, Validation)
// signal / wavelet / features
ACTIREHAB_DEFINE_ERROR(NonFiniteInput, Validation)
ACTIREHAB_DEFINE_ERROR(EmptyRecording, Validation)
ACTIREHAB_DEFINE_ERROR(BadLength, Validation)
ACTIREHAB_DEFINE_ERROR(ShapeMismatch, Validation)
// modeling / eval
ACTIREHAB_DEFINE_ERROR(DimensionMismatch, Validation)
ACTIREHAB_DEFINE_ERROR(ConstantColumn, Validation)
ACTIREHAB_DEFINE_ERROR(InsufficientSubjects, Validation)
ACTIREHAB_DEFINE_ERROR(RankDeficient, Numerical)
ACTIREHAB_DEFINE_ERROR(NonConvergence, Numerical)
ACTIREHAB_DEFINE_ERROR(NonPositiveDefinite, Numerical)
ACTIREHAB_DEFINE_ERROR(OptimFailure, Numerical)
// cli
ACTIREHAB_DEFINE_ERROR(UsageError, Usage)

#undef ACTIREHAB_DEFINE_ERROR

}  // namespace actirehab
