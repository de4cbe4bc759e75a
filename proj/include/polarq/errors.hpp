#pragma once

#include <stdexcept>
#include <string>

namespace polarq {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define POLARQ_DEFINE_ERROR(Name)                                              \
    struct Name : Error {                                                      \
        explicit Name(const std::string& what) : Error(#Name ": " + what) {}   \
    }

// dmc_core
POLARQ_DEFINE_ERROR(NonStochasticRow);
POLARQ_DEFINE_ERROR(NegativeEntry);
POLARQ_DEFINE_ERROR(EmptyAlphabet);
POLARQ_DEFINE_ERROR(EqualInputs);
POLARQ_DEFINE_ERROR(IndexOutOfRange);
POLARQ_DEFINE_ERROR(GroupSizeMismatch);
POLARQ_DEFINE_ERROR(OutOfRange);
POLARQ_DEFINE_ERROR(BudgetTooSmall);

// algebra
POLARQ_DEFINE_ERROR(NotPrimePower);
POLARQ_DEFINE_ERROR(EnumerationTooLarge);
POLARQ_DEFINE_ERROR(EvenCharacteristic);

// kernels
POLARQ_DEFINE_ERROR(AlgebraMismatch);
POLARQ_DEFINE_ERROR(EmptyPermutationSet);
POLARQ_DEFINE_ERROR(InvalidMultiplier);
POLARQ_DEFINE_ERROR(BadFactorization);
POLARQ_DEFINE_ERROR(BadMap);

// polar_construction
POLARQ_DEFINE_ERROR(BadDelta);
POLARQ_DEFINE_ERROR(KOutOfRange);
POLARQ_DEFINE_ERROR(BadBeta);

// codec
POLARQ_DEFINE_ERROR(LengthMismatch);
POLARQ_DEFINE_ERROR(IncompleteSchedule);
POLARQ_DEFINE_ERROR(DegenerateLikelihood);
POLARQ_DEFINE_ERROR(SpecMismatch);

// harness
POLARQ_DEFINE_ERROR(BadParam);
POLARQ_DEFINE_ERROR(FileParseError);

#undef POLARQ_DEFINE_ERROR

} // namespace polarq
