#pragma once

#include <stdexcept>
#include <string>

namespace dehnlab {

// All recoverable failures are thrown as subclasses of Error so callers can
// catch the whole family or a specific condition.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define DEHNLAB_ERROR(NAME)                                        \
    class NAME : public Error {                                    \
    public:                                                        \
        explicit NAME(const std::string& msg = #NAME) : Error(msg) {} \
    }

DEHNLAB_ERROR(ParseError);
DEHNLAB_ERROR(DimensionMismatch);
DEHNLAB_ERROR(NotUnimodular);

DEHNLAB_ERROR(PatternMismatch);
DEHNLAB_ERROR(IndexClash);
DEHNLAB_ERROR(NotTriangular);
DEHNLAB_ERROR(NotIdentity);
DEHNLAB_ERROR(BlockTooLarge);
DEHNLAB_ERROR(NotInParabolic);
DEHNLAB_ERROR(BlocksNotDisjoint);
DEHNLAB_ERROR(NotRank2);
DEHNLAB_ERROR(DepthExceeded);
DEHNLAB_ERROR(MoveBudgetExceeded);

DEHNLAB_ERROR(Singular);
DEHNLAB_ERROR(NotPositiveDefinite);
DEHNLAB_ERROR(ReductionFailed);
DEHNLAB_ERROR(EnumerationBudgetExceeded);

DEHNLAB_ERROR(FieldViolation);
DEHNLAB_ERROR(ClassificationFailed);

DEHNLAB_ERROR(DegenerateSeries);
DEHNLAB_ERROR(IoError);

#undef DEHNLAB_ERROR

} // namespace dehnlab
