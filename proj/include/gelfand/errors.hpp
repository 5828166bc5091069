#pragma once

#include <stdexcept>
#include <string>

namespace gelfand {

// Base for all domain-specific failures raised by the library.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define GELFAND_DEFINE_ERROR(NAME)                                  \
  class NAME : public Error {                                       \
  public:                                                           \
    explicit NAME(const std::string& msg) : Error(#NAME ": " + msg) {} \
  }

GELFAND_DEFINE_ERROR(PointOutsideDomain);
GELFAND_DEFINE_ERROR(CoincidentPoints);
GELFAND_DEFINE_ERROR(DegenerateConfiguration);
GELFAND_DEFINE_ERROR(NewtonDiverged);
GELFAND_DEFINE_ERROR(EscapedDomain);
GELFAND_DEFINE_ERROR(LambdaOutOfRange);
GELFAND_DEFINE_ERROR(IndexOutOfBand);
GELFAND_DEFINE_ERROR(NotCirculant);
GELFAND_DEFINE_ERROR(JacobianSingular);
GELFAND_DEFINE_ERROR(StepFloorReached);
GELFAND_DEFINE_ERROR(MeshUnderResolved);
GELFAND_DEFINE_ERROR(WeightNotPositive);
GELFAND_DEFINE_ERROR(ConvergenceFailure);
GELFAND_DEFINE_ERROR(WrongPeakCount);
GELFAND_DEFINE_ERROR(WindowExceedsGrid);
GELFAND_DEFINE_ERROR(QuadratureNotConverged);
GELFAND_DEFINE_ERROR(ConfigError);

#undef GELFAND_DEFINE_ERROR

} // namespace gelfand
