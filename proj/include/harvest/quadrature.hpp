#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

namespace harvest::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
    bool converged = false;
};

struct QuadratureError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline constexpr double kAbsTol = 1e-10;
inline constexpr double kRelTol = 1e-8;

/// Adaptive Gauss-Kronrod (G7,K15). Integrands must be smooth on [a,b];
/// remove endpoint singularities by substitution before calling.
template <typename F>
Result integrate(F&& f, double a, double b,
                 double abs_tol = kAbsTol, double rel_tol = kRelTol) {
    if (a == b) return {0.0, 0.0, true};
    using gk = boost::math::quadrature::gauss_kronrod<double, 15>;
    double err = 0.0;
    const double value = gk::integrate(f, a, b, 15, rel_tol, &err);
    Result r{value, err, false};
    r.converged = err <= std::max(abs_tol, rel_tol * std::abs(value));
    return r;
}

template <typename F>
double integrate_or_throw(F&& f, double a, double b,
                          double abs_tol = kAbsTol, double rel_tol = kRelTol) {
    const Result r = integrate(f, a, b, abs_tol, rel_tol);
    if (!r.converged) {
        throw QuadratureError("quadrature did not converge: achieved absolute error " +
                              std::to_string(r.error) + " on value " +
                              std::to_string(r.value));
    }
    return r.value;
}

/// tanh-sinh rule; tolerates integrable endpoint singularities (1/sqrt type).
template <typename F>
double integrate_singular(F&& f, double a, double b, double rel_tol = 1e-9) {
    if (a == b) return 0.0;
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(f, a, b, rel_tol);
}

}  // namespace harvest::quad
