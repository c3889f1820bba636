#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mav {

// All times are integer minutes on the planning grid.
using Minutes = long long;

struct MavError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidPtnError : MavError {
    using MavError::MavError;
};
struct MissingWindowError : MavError {
    using MavError::MavError;
};
struct ParseError : MavError {
    using MavError::MavError;
};
struct SemanticError : MavError {
    using MavError::MavError;
};
struct InfeasibleSpecError : MavError {
    using MavError::MavError;
};
struct InfeasibleHorizonError : MavError {
    using MavError::MavError;
};
struct UnknownStopError : MavError {
    using MavError::MavError;
};
struct NumericalFailure : MavError {
    using MavError::MavError;
};
struct SearchSpaceTooLarge : MavError {
    using MavError::MavError;
};
struct StageInfeasibleError : MavError {
    using MavError::MavError;
};
struct DivisionByZeroError : MavError {
    using MavError::MavError;
};

}  // namespace mav
