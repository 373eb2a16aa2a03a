#pragma once

#include <stdexcept>
#include <string>

namespace gf {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Point outside a chart domain, box not inside a domain, etc.
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

// Bad parameter values (eps outside (0,1], negative radius, ...).
struct ParameterError : Error {
    explicit ParameterError(const std::string& msg) : Error(msg) {}
};

// Division without a nonvanishing-denominator certificate.
struct CertificateError : Error {
    explicit CertificateError(const std::string& msg) : Error(msg) {}
};

// Expression DSL / distribution spec / config parse failure.
struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

// Adaptive quadrature failed to reach the requested tolerance.
struct QuadratureError : Error {
    explicit QuadratureError(const std::string& msg) : Error(msg) {}
};

// Composition target range escapes the outer domain, grid mismatches, ...
struct CompositionError : Error {
    explicit CompositionError(const std::string& msg) : Error(msg) {}
};

// A distribution spec the embedding does not support.
struct UnsupportedDistributionError : Error {
    explicit UnsupportedDistributionError(const std::string& msg) : Error(msg) {}
};

// Metric validation failure (non-symmetric, degenerate, unstable signature).
struct MetricError : Error {
    explicit MetricError(const std::string& msg) : Error(msg) {}
};

}  // namespace gf
