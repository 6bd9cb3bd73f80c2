#ifndef CORRLAB_ERRORS_HPP
#define CORRLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace corrlab {

// Base class for all validation and computation failures thrown by the
// library.  Every subclass carries only a message; the type itself is the
// machine-readable part of the contract.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define CORRLAB_DEFINE_ERROR(NAME)                                  \
    struct NAME : Error {                                           \
        explicit NAME(const std::string& what) : Error(what) {}     \
    }

CORRLAB_DEFINE_ERROR(NegativeEntry);      // matrix entry below tolerance
CORRLAB_DEFINE_ERROR(SumNotOne);          // distribution does not sum to 1
CORRLAB_DEFINE_ERROR(DuplicateAlpha);     // repeated point in a point list
CORRLAB_DEFINE_ERROR(NonpositiveScale);   // normalization of a nonpositive total
CORRLAB_DEFINE_ERROR(BadParameter);       // parameter outside documented range
CORRLAB_DEFINE_ERROR(SchmidtOrder);       // coefficients not sorted descending / not positive
CORRLAB_DEFINE_ERROR(AlphaSumNonzero);    // point list must be centered
CORRLAB_DEFINE_ERROR(Condition3Violated); // skew parameter out of range for the block family
CORRLAB_DEFINE_ERROR(BadLambda);          // noise strength outside [0,1)
CORRLAB_DEFINE_ERROR(NotBipartite);       // state dimension is not a product of the local dims
CORRLAB_DEFINE_ERROR(DimensionMismatch);
CORRLAB_DEFINE_ERROR(NotNormalized);      // state vector or density matrix not normalized
CORRLAB_DEFINE_ERROR(SingularSum);        // factor sum not invertible
CORRLAB_DEFINE_ERROR(NotDiagonalized);    // factorization lacks the diagonal-sum form
CORRLAB_DEFINE_ERROR(FactorizationInvalid);
CORRLAB_DEFINE_ERROR(LambdaOne);          // construction undefined at lambda = 1
CORRLAB_DEFINE_ERROR(InfeasibleST);       // weight pair cannot support the construction
CORRLAB_DEFINE_ERROR(CertificateInvalid); // claimed feasibility certificate fails recheck
CORRLAB_DEFINE_ERROR(InconsistentBounds); // lower bound exceeds upper bound
CORRLAB_DEFINE_ERROR(NotPositive);        // operation requires strictly positive entries
CORRLAB_DEFINE_ERROR(ParseError);         // malformed file or text input

#undef CORRLAB_DEFINE_ERROR

} // namespace corrlab

#endif
