#pragma once

#include <boost/math/quadrature/exp_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>

namespace fsci::test {

// Densities integrated numerically; independent of the incomplete-beta path.

inline double t_density(double t, double nu) {
    return std::exp(std::lgamma((nu + 1) / 2) - std::lgamma(nu / 2)) / std::sqrt(nu * std::numbers::pi) *
           std::pow(1 + t * t / nu, -(nu + 1) / 2);
}

inline double f_density(double x, double d1, double d2) {
    const double lb = std::lgamma(d1 / 2) + std::lgamma(d2 / 2) - std::lgamma((d1 + d2) / 2);
    return std::exp((d1 / 2) * std::log(d1 / d2) + (d1 / 2 - 1) * std::log(x) - ((d1 + d2) / 2) * std::log1p(d1 * x / d2) - lb);
}

inline double quad_t_two_sided(double t, double nu) {
    boost::math::quadrature::exp_sinh<double> integrator;
    return 2.0 * integrator.integrate([&](double s) { return t_density(s, nu); }, std::abs(t),
                                      std::numeric_limits<double>::infinity());
}

inline double quad_f_upper(double f, double d1, double d2) {
    boost::math::quadrature::exp_sinh<double> integrator;
    return integrator.integrate([&](double s) { return f_density(s, d1, d2); }, f,
                                std::numeric_limits<double>::infinity());
}

} // namespace fsci::test
