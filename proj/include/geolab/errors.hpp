#ifndef GEOLAB_ERRORS_HPP
#define GEOLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace geolab {

/// Base class for all geolab exceptions.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A pointwise operation was evaluated on the degenerate locus phi in {0, pi}
/// (outside the guard band) without opting into boundary-limit evaluation.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

/// The metric coefficient lambda(r) vanished where a positive value is required.
class PoleError : public Error {
public:
    using Error::Error;
};

/// Input outside the admissible domain of a profile or operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A trajectory left the phi guard band where that was not permitted.
class BoundaryApproachError : public Error {
public:
    using Error::Error;
};

/// The adaptive integrator could not meet the requested tolerance.
class StepFailureError : public Error {
public:
    using Error::Error;
};

/// |dr/dphi| exceeded the parametrization switch threshold.
class SlopeBlowupError : public Error {
public:
    using Error::Error;
};

/// A shot geodesic failed to reach r = 0 before the phi margin.
class NoCrossingError : public Error {
public:
    using Error::Error;
};

/// The boundary series start is not accurate enough at the requested phi_start.
class SeriesInvalidError : public Error {
public:
    using Error::Error;
};

} // namespace geolab

#endif
