#ifndef SEGRE_ERRORS_HPP
#define SEGRE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace segre {

/** \brief Base of every error raised by the library. */
class Error : public std::runtime_error {
public:
    Error(const std::string& kind, const std::string& msg)
        : std::runtime_error(kind + ": " + msg), kind_(kind) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

#define SEGRE_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                               \
    public:                                                                   \
        explicit Name(const std::string& msg) : Error(#Name, msg) {}          \
    };

SEGRE_DEFINE_ERROR(SingularJacobian)
SEGRE_DEFINE_ERROR(OrderTooSmall)
SEGRE_DEFINE_ERROR(TruncationInsufficient)
SEGRE_DEFINE_ERROR(FieldMismatch)
SEGRE_DEFINE_ERROR(NotInvertible)
SEGRE_DEFINE_ERROR(PreconditionFailed)
SEGRE_DEFINE_ERROR(IrrationalEigenvalue)
SEGRE_DEFINE_ERROR(DegeneratePencil)
SEGRE_DEFINE_ERROR(DuplicateEigenvalue)
SEGRE_DEFINE_ERROR(CrossCheckMismatch)
SEGRE_DEFINE_ERROR(NonIsolatedSingularity)
SEGRE_DEFINE_ERROR(UnsupportedType)
SEGRE_DEFINE_ERROR(PointSingular)
SEGRE_DEFINE_ERROR(PointNotOnLine)
SEGRE_DEFINE_ERROR(RetryExhausted)
SEGRE_DEFINE_ERROR(ReducibleImageConic)
SEGRE_DEFINE_ERROR(HyperplaneNotTangent)
SEGRE_DEFINE_ERROR(RootFieldUnsupported)
SEGRE_DEFINE_ERROR(NoDoubleRoot)
SEGRE_DEFINE_ERROR(NoRationalPoints)
SEGRE_DEFINE_ERROR(ParseError)
SEGRE_DEFINE_ERROR(ValidationError)

#undef SEGRE_DEFINE_ERROR

} // namespace segre

#endif
