#pragma once

#include <stdexcept>

namespace slung {

enum class Integrator { RK4, Euler };

/// One fixed step of x' = f(x). Vec needs +, and scalar * (Eigen vectors work).
template <class Vec, class F>
Vec integrate_step(Integrator scheme, const Vec& x, double h, F&& f) {
    switch (scheme) {
    case Integrator::Euler: return Vec(x + h * f(x));
    case Integrator::RK4: {
        const Vec k1 = f(x);
        const Vec k2 = f(Vec(x + 0.5 * h * k1));
        const Vec k3 = f(Vec(x + 0.5 * h * k2));
        const Vec k4 = f(Vec(x + h * k3));
        return Vec(x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
    }
    }
    throw std::logic_error("unknown integrator");
}

} // namespace slung
