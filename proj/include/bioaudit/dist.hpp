#pragma once

// Distribution tail probabilities for the test kernels. The statistics are
// computed in statkit; only the classical survival functions are delegated
// to Boost.Math.

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/digamma.hpp>

namespace bioaudit {

inline double chi2_survival(double statistic, int dof) {
    if (statistic <= 0.0) return 1.0;
    boost::math::chi_squared dist(static_cast<double>(dof));
    return boost::math::cdf(boost::math::complement(dist, statistic));
}

inline double student_t_two_sided(double t, double dof) {
    boost::math::students_t dist(dof);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

inline double normal_two_sided(double z) {
    boost::math::normal dist;
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(z)));
}

inline double digamma(double x) { return boost::math::digamma(x); }

}  // namespace bioaudit
