#pragma once

#include <stdexcept>
#include <string>

namespace orlicz {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define ORLICZ_DEFINE_ERROR(Name)            \
    class Name : public Error {              \
    public:                                  \
        using Error::Error;                  \
    }

ORLICZ_DEFINE_ERROR(DomainError);
ORLICZ_DEFINE_ERROR(ConjugateError);
ORLICZ_DEFINE_ERROR(BracketError);
ORLICZ_DEFINE_ERROR(SingularPointError);
ORLICZ_DEFINE_ERROR(QuadratureError);
ORLICZ_DEFINE_ERROR(ResolutionError);
ORLICZ_DEFINE_ERROR(EmptyRegionError);
ORLICZ_DEFINE_ERROR(NumericalBreakdown);
ORLICZ_DEFINE_ERROR(SpecError);
ORLICZ_DEFINE_ERROR(PreconditionError);
ORLICZ_DEFINE_ERROR(AssumptionError);
ORLICZ_DEFINE_ERROR(ConfigError);

#undef ORLICZ_DEFINE_ERROR

}  // namespace orlicz
