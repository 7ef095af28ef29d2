#pragma once

#include <stdexcept>
#include <string>

namespace tdin {

// Base class for everything thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad inputs: malformed files, out-of-range arguments, contract violations
// by the caller. The CLI maps these to exit code 2.
struct ValidationError : Error {
    using Error::Error;
};

// Failures at run time that are not the caller's fault: numerical blowups,
// I/O errors, broken invariants detected mid-computation. Exit code 3.
struct RuntimeFailure : Error {
    using Error::Error;
};

// --- point process core ---
struct EmptyWindow : ValidationError { using ValidationError::ValidationError; };
struct InvalidInterval : ValidationError { using ValidationError::ValidationError; };
struct NonPositiveIntensityAtEvent : RuntimeFailure { using RuntimeFailure::RuntimeFailure; };
struct TimeBeforeLastEvent : ValidationError { using ValidationError::ValidationError; };
struct DegenerateHorizon : ValidationError { using ValidationError::ValidationError; };
struct BoundViolation : RuntimeFailure { using RuntimeFailure::RuntimeFailure; };

// --- hawkes ---
struct FutureEventInHistory : ValidationError { using ValidationError::ValidationError; };

// --- graph ---
struct UnknownFirm : ValidationError { using ValidationError::ValidationError; };
struct OutOfWindow : ValidationError { using ValidationError::ValidationError; };
struct IoFailure : RuntimeFailure { using RuntimeFailure::RuntimeFailure; };

// --- neural ---
struct ShapeMismatch : ValidationError { using ValidationError::ValidationError; };
struct EmptyNeighborhood : ValidationError { using ValidationError::ValidationError; };
struct EmptyCandidateSet : ValidationError { using ValidationError::ValidationError; };

// --- model ---
struct NegativeGap : ValidationError { using ValidationError::ValidationError; };
struct DimensionMismatch : ValidationError { using ValidationError::ValidationError; };
struct UnknownFirmInDeal : ValidationError { using ValidationError::ValidationError; };
struct EmptyCandidatePool : ValidationError { using ValidationError::ValidationError; };
struct UnknownAcquirer : ValidationError { using ValidationError::ValidationError; };
struct CandidateNotAvailable : ValidationError { using ValidationError::ValidationError; };
struct DivergenceDetected : RuntimeFailure { using RuntimeFailure::RuntimeFailure; };

// --- data ---
struct ColumnGloballyMissing : ValidationError { using ValidationError::ValidationError; };
struct InfeasibleConfig : ValidationError { using ValidationError::ValidationError; };

// --- evaluation ---
struct SingleClassData : ValidationError { using ValidationError::ValidationError; };
struct InsufficientHistory : ValidationError { using ValidationError::ValidationError; };

}  // namespace tdin
