#ifndef GIGAQBX_TYPES_HPP
#define GIGAQBX_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>

namespace gigaqbx {

// The plane is identified with the complex numbers throughout.
using Complex = std::complex<double>;

constexpr double pi = 3.14159265358979323846;

// Violated caller contract (bad arguments, geometry that fails a
// documented requirement). CLI maps these to exit code 2.
struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Internal consistency failure. CLI maps these to exit code 3.
struct InvariantError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
    if (!cond) throw PreconditionError(what);
}

} // namespace gigaqbx

#endif
