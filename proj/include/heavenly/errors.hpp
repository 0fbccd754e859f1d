#pragma once

#include <stdexcept>
#include <string>

namespace heavenly {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TruncationMismatch : Error {
    using Error::Error;
};
struct GradingViolation : Error {
    using Error::Error;
};
struct NotInAlgebraQ : Error {
    using Error::Error;
};
struct NotInGroup : Error {
    using Error::Error;
};
struct SingularBackground : Error {
    using Error::Error;
};
struct NonCompatibleOneForm : Error {
    using Error::Error;
};
struct NonPolynomialIntegrand : Error {
    using Error::Error;
};
struct SeedRejected : Error {
    using Error::Error;
};
struct ChartMismatch : Error {
    using Error::Error;
};
struct AnsatzExhausted : Error {
    using Error::Error;
};
struct ContourSingularity : Error {
    using Error::Error;
};
struct GuardBand : Error {
    using Error::Error;
};
struct InterpolationOverflow : Error {
    using Error::Error;
};
struct ResidualExceeded : Error {
    using Error::Error;
};
struct LiouvilleViolation : Error {
    using Error::Error;
};
struct ParseError : Error {
    using Error::Error;
};

}  // namespace heavenly
