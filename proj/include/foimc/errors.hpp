#pragma once

#include <stdexcept>

namespace foimc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Argument outside an operation's numeric domain (e.g. omega <= 0).
struct DomainError : Error {
    using Error::Error;
};

// Margin spec or plant model violates the method's validity conditions.
struct SpecError : Error {
    using Error::Error;
};

// The requested order/margin combination has no real gain crossover.
struct RealnessError : Error {
    using Error::Error;
};

// Open-loop denominator vanished at the evaluation frequency.
struct SingularityError : Error {
    using Error::Error;
};

// Order bound undefined at phi_m = pi/2; callers must use the case split.
struct BranchError : Error {
    using Error::Error;
};

// The two lambda curves never cross for the requested margin pair.
struct NoIntersectionError : Error {
    using Error::Error;
};

// A frequency sweep contains no gain (or phase) crossover.
struct NoCrossoverError : Error {
    using Error::Error;
};

// Brute-force search could not match the requested margins.
struct OracleError : Error {
    using Error::Error;
};

// Quadrature failed to converge; message carries the achieved estimate.
struct IntegrationError : Error {
    using Error::Error;
};

// Config file could not be parsed or validated.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace foimc
