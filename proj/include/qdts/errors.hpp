#pragma once

#include <stdexcept>
#include <string>

namespace qdts {

struct MalformedRow : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonIncreasingTimestamp : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrajectoryTooShort : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DuplicateTrajectoryId : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutOfRangeCoordinate : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetTooSmall : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EmptyWorkload : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InsufficientCandidates : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Exhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct CubeExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoCandidates : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoValidAction : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MalformedResults : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingFile : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace qdts
