#pragma once

// Scalar root bracketing via Brent's method: bisection interleaved with
// secant and inverse quadratic interpolation. Used to tune the small-world
// rewiring probability and to profile the negative-binomial dispersion.

#include <cmath>
#include <stdexcept>
#include <utility>

namespace bioaudit {

struct BrentResult {
    double x = 0.0;
    double fx = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Requires f(a) and f(b) of opposite sign. Stops when the bracket shrinks
// below xtol (+ relative machine tolerance) or |f| <= ftol.
template <typename F>
BrentResult brent_root(F&& f, double a, double b, double xtol = 1e-10,
                       double ftol = 0.0, int max_iter = 200) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return {a, fa, 0, true};
    if (fb == 0.0) return {b, fb, 0, true};
    if ((fa > 0.0) == (fb > 0.0))
        throw std::invalid_argument("brent_root: endpoints do not bracket a root");

    double c = a, fc = fa;
    double d = b - a, e = d;

    BrentResult out;
    for (int iter = 1; iter <= max_iter; ++iter) {
        out.iterations = iter;
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = e = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::fabs(b) + 0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || fb == 0.0 || std::fabs(fb) <= ftol) {
            out.x = b;
            out.fx = fb;
            out.converged = true;
            return out;
        }
        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            // Attempt interpolation.
            const double s = fb / fa;
            double p, q;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            const double min1 = 3.0 * xm * q - std::fabs(tol1 * q);
            const double min2 = std::fabs(e * q);
            if (2.0 * p < (min1 < min2 ? min1 : min2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if (std::fabs(d) > tol1)
            b += d;
        else
            b += (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    out.x = b;
    out.fx = fb;
    out.converged = false;
    return out;
}

}  // namespace bioaudit
