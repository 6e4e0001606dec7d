#pragma once

#include <stdexcept>
#include <string>

namespace inclab {

// Base of every recoverable failure raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define INCLAB_DEFINE_ERROR(Name)                                              \
    class Name : public Error {                                                \
    public:                                                                    \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {}   \
    }

INCLAB_DEFINE_ERROR(InvalidArgument);
INCLAB_DEFINE_ERROR(NotInE);
INCLAB_DEFINE_ERROR(TooManyDraws);
INCLAB_DEFINE_ERROR(TooManyParts);
INCLAB_DEFINE_ERROR(DoesNotFit);
INCLAB_DEFINE_ERROR(DomainMismatch);
INCLAB_DEFINE_ERROR(Frozen);
INCLAB_DEFINE_ERROR(SchemeMismatch);
INCLAB_DEFINE_ERROR(NonpositiveTime);
INCLAB_DEFINE_ERROR(BadSimplexPoint);
INCLAB_DEFINE_ERROR(TooSparse);
INCLAB_DEFINE_ERROR(MismatchedSetup);
INCLAB_DEFINE_ERROR(GridTooCoarse);

#undef INCLAB_DEFINE_ERROR

}  // namespace inclab
