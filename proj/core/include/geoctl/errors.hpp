#pragma once

#include <stdexcept>
#include <string>

namespace geoctl {

// Base class for all toolkit errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Point outside the chart, or a finite-difference stencil leaving it.
struct DomainError : Error {
    using Error::Error;
};

// |det g| below the degeneracy threshold at an evaluated point.
struct DegenerateMetric : Error {
    using Error::Error;
};

// Jacobi conformal factor 2(E - V) below jacobi_epsilon.
struct HillBoundary : Error {
    using Error::Error;
};

// Actuation frame linearly dependent at an evaluated point.
struct RankDeficientFrame : Error {
    using Error::Error;
};

// Metric speed below threshold during arc-length reparametrization.
struct ZeroSpeed : Error {
    using Error::Error;
};

// Trajectory left the chart during integration.
struct DomainExit : Error {
    using Error::Error;
};

// Adaptive step underflow or step budget exhausted.
struct StepFailure : Error {
    using Error::Error;
};

// Matching residual above tolerance on the declared sample region.
struct MatchingFailed : Error {
    using Error::Error;
};

// Name not present in the systems catalog.
struct UnknownSystem : Error {
    using Error::Error;
};

// No in-bounds family parameter produced a usable metric.
struct AllCandidatesDegenerate : Error {
    using Error::Error;
};

}  // namespace geoctl
