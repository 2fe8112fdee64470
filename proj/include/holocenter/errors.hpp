#pragma once

// Error taxonomy shared by all engines. Every failure mode that callers are
// expected to branch on gets its own type; everything derives from Error so
// the CLI can map "any analysis failure" to one exit code.

#include <stdexcept>
#include <string>

namespace holocenter {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad arguments: dimension mismatches, non-finite entries, out-of-cap degrees.
struct InvalidInput : Error {
    using Error::Error;
};

// Linear system singular or too ill-conditioned to trust the solution.
struct SingularSystem : Error {
    using Error::Error;
};

// Malformed scenario / field document. Carries a human-readable location.
struct ParseError : Error {
    ParseError(const std::string& where, const std::string& what)
        : Error(where + ": " + what), location(where) {}
    std::string location;
};

// Trajectory left the trust ball (holomorphic flows can blow up in finite time).
struct Blowup : Error {
    using Error::Error;
};

// Adaptive integrator exceeded its step budget.
struct StepLimit : Error {
    using Error::Error;
};

// A root landed within separation tolerance of the region boundary, so the
// inside/outside decision (and hence the count) is not trustworthy.
struct BoundaryAmbiguity : Error {
    using Error::Error;
};

// The iterated map is the identity (or indistinguishable from it) on the
// region, so no isolated fixed point exists to index.
struct NonIsolated : Error {
    using Error::Error;
};

// 1-D series oracle: every coefficient vanished up to the truncation cap.
struct NonIsolatedOrCapExceeded : NonIsolated {
    using NonIsolated::NonIsolated;
};

// Newton failed to track the transverse disk equations (delta too large, or
// the transverse Jacobian is singular).
struct DiskNotFound : Error {
    using Error::Error;
};

// The first-coordinate identity on the disk samples failed beyond tolerance.
struct InconsistentDisk : Error {
    using Error::Error;
};

// A stated precondition failed a numerical check (e.g. a singularity sits on
// the sampling sphere).
struct PreconditionFailed : Error {
    using Error::Error;
};

}  // namespace holocenter
