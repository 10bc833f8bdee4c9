#pragma once

#include <stdexcept>
#include <string>

namespace higgsstrat {

// Domain errors carry a stable name; the CLI prints it on stderr and exits 1.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& detail)
        : std::runtime_error(name + ": " + detail), name_(std::move(name)) {}
    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define HIGGSSTRAT_ERROR(Cls)                                                \
    struct Cls : Error {                                                     \
        explicit Cls(const std::string& detail) : Error(#Cls, detail) {}     \
    }

HIGGSSTRAT_ERROR(InvalidArgument);
HIGGSSTRAT_ERROR(DimensionMismatch);
HIGGSSTRAT_ERROR(MismatchedAmbient);
HIGGSSTRAT_ERROR(IndexOutOfRange);
HIGGSSTRAT_ERROR(NonPositiveBlockDimension);
HIGGSSTRAT_ERROR(CapExceeded);
HIGGSSTRAT_ERROR(DegeneratePoint);
HIGGSSTRAT_ERROR(NotInY);
HIGGSSTRAT_ERROR(InvariantViolation);
HIGGSSTRAT_ERROR(AmbiguousMembership);
HIGGSSTRAT_ERROR(Unclassified);
HIGGSSTRAT_ERROR(ParseError);

#undef HIGGSSTRAT_ERROR

}  // namespace higgsstrat
