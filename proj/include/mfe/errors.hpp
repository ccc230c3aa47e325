#pragma once

#include <stdexcept>

namespace mfe {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// torus core
struct NonZeroMean : Error { using Error::Error; };

// functional / solver
struct Inadmissible : Error { using Error::Error; };
struct InadmissibleInit : Error { using Error::Error; };
struct LineSearchStall : Error { using Error::Error; };
struct TooFewSamples : Error { using Error::Error; };

// green
struct PoleCoincidence : Error { using Error::Error; };
struct InsufficientResolution : Error { using Error::Error; };
struct NonConvergence : Error { using Error::Error; };
struct AdmissibilityLoss : Error { using Error::Error; };
struct IllConditionedFit : Error { using Error::Error; };

// asymptotics
struct EmptyPositiveSet : Error { using Error::Error; };
struct GluingMismatch : Error { using Error::Error; };
struct BadRadii : Error { using Error::Error; };

// cli
struct ConfigError : Error { using Error::Error; };

}  // namespace mfe
