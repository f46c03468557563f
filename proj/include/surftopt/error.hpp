// Error taxonomy for the surftopt library.
//
// Every failure surfaces as a subclass of Error carrying an ErrorDomain;
// the CLI maps domains to process exit codes (see app.hpp).

#pragma once

#include <stdexcept>
#include <string>

namespace surftopt {

enum class ErrorDomain {
    config,     // bad configuration file, key, or coefficient set
    mesh,       // mesh construction, file parsing, topology violations
    solver,     // iterative solver breakdown / non-convergence
    optimizer,  // optimization loop failures
    io,         // file read/write failures
};

class Error : public std::runtime_error {
public:
    Error(ErrorDomain domain, const std::string& what)
        : std::runtime_error(what), domain_(domain) {}

    ErrorDomain domain() const noexcept { return domain_; }

private:
    ErrorDomain domain_;
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(ErrorDomain::config, what) {}
};

struct MeshError : Error {
    explicit MeshError(const std::string& what) : Error(ErrorDomain::mesh, what) {}
};

struct SolverError : Error {
    SolverError(const std::string& what, int iterations, double residual)
        : Error(ErrorDomain::solver, what), iterations(iterations), residual(residual) {}
    int iterations;
    double residual;  // relative residual at failure
};

struct OptimizerError : Error {
    explicit OptimizerError(const std::string& what) : Error(ErrorDomain::optimizer, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorDomain::io, what) {}
};

}  // namespace surftopt
