#ifndef QMELAB_ERRORS_HPP
#define QMELAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qmelab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define QMELAB_ERROR_TYPE(Name)        \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  }

QMELAB_ERROR_TYPE(ConfigError);
QMELAB_ERROR_TYPE(DegenerateSpectrum);
QMELAB_ERROR_TYPE(SymmetryBroken);
QMELAB_ERROR_TYPE(PoleInOccupation);
QMELAB_ERROR_TYPE(QuadratureDiverged);
QMELAB_ERROR_TYPE(NonUniqueSteadyState);
QMELAB_ERROR_TYPE(NonErgodicRateMatrix);
QMELAB_ERROR_TYPE(EvolutionFailed);
QMELAB_ERROR_TYPE(ExtractionFailed);
QMELAB_ERROR_TYPE(SplitUnavailable);
QMELAB_ERROR_TYPE(InvalidTestOperator);
QMELAB_ERROR_TYPE(NonHermitianState);
QMELAB_ERROR_TYPE(InsufficientData);

#undef QMELAB_ERROR_TYPE

}  // namespace qmelab

#endif
