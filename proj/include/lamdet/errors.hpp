#pragma once

#include <stdexcept>

namespace lamdet {

// Base class for numerical and model failures. The CLI maps these to exit
// code 3; configuration problems use ConfigError (exit code 2) instead.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotPositiveDefinite : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct OutOfVisibleRegion : Error { using Error::Error; };
struct OrderExceedsAperture : Error { using Error::Error; };
struct IdentifiabilityViolation : Error { using Error::Error; };
struct DegenerateVector : Error { using Error::Error; };
struct EmptyGrid : Error { using Error::Error; };
struct InvalidNoise : Error { using Error::Error; };
struct InsufficientSecondaryData : Error { using Error::Error; };
struct SingularSampleCovariance : Error { using Error::Error; };
struct DegenerateAmplitude : Error { using Error::Error; };
struct SingularFisherBlock : Error { using Error::Error; };
struct CalibrationUnderpowered : Error { using Error::Error; };
struct NoValidTrials : Error { using Error::Error; };
struct IncompleteSpecification : Error { using Error::Error; };

} // namespace lamdet
