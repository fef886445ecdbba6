#pragma once

// Regression fits shared by the audit modules.
//
//   ols_fit     least squares with classical standard errors and t tests
//   negbin_fit  NB2 (variance mu + alpha*mu^2) with log link, fitted by
//               alternating IRLS for the coefficients with a bracketed
//               Brent solve of the profile score for the dispersion
//
// Both report AIC and serialize into RegressionFit; NB terms carry the
// incidence rate ratio exp(beta).

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bioaudit/brent.hpp"
#include "bioaudit/dist.hpp"

namespace bioaudit::statkit {

enum class Family { ols, negative_binomial };

struct Term {
    std::string name;
    double beta = 0.0;
    double std_err = 0.0;
    double p_value = 1.0;
    double irr = std::numeric_limits<double>::quiet_NaN();  // exp(beta), NB fits
};

struct RegressionFit {
    Family family = Family::ols;
    std::vector<Term> terms;
    std::optional<double> dispersion;  // NB alpha
    double aic = 0.0;
    double log_likelihood = 0.0;
    std::size_t n_obs = 0;
    std::optional<double> r_squared;  // OLS only

    const Term& term(const std::string& name) const {
        for (const auto& t : terms)
            if (t.name == name) return t;
        throw std::out_of_range("no such term: " + name);
    }
};

namespace detail {

inline void check_design(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                         const std::vector<std::string>& names) {
    if (static_cast<std::size_t>(X.cols()) != names.size())
        throw std::invalid_argument("design matrix columns and term names disagree");
    if (y.size() != X.rows())
        throw std::invalid_argument("response and design matrix rows disagree");
    if (X.rows() <= X.cols())
        throw std::invalid_argument("need more observations than design columns");
}

inline void check_full_rank(const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr,
                            const std::vector<std::string>& names) {
    const auto k = qr.cols();
    if (qr.rank() == k) return;
    std::ostringstream msg;
    msg << "design matrix is rank deficient; collinear columns:";
    const auto& perm = qr.colsPermutation().indices();
    for (Eigen::Index i = qr.rank(); i < k; ++i) msg << ' ' << names[perm[i]];
    throw std::invalid_argument(msg.str());
}

// (X^T X)^{-1} from the pivoted QR factorization: X P = Q R.
inline Eigen::MatrixXd xtx_inverse(const Eigen::ColPivHouseholderQR<Eigen::MatrixXd>& qr) {
    const auto k = qr.cols();
    const Eigen::MatrixXd r = qr.matrixR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd rinv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd unpermuted = rinv * rinv.transpose();
    const auto& p = qr.colsPermutation();
    return p * unpermuted * p.transpose();
}

}  // namespace detail

inline RegressionFit ols_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                             const std::vector<std::string>& names) {
    detail::check_design(y, X, names);
    const Eigen::Index n = X.rows(), k = X.cols();

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    detail::check_full_rank(qr, names);

    const Eigen::VectorXd beta = qr.solve(y);
    const Eigen::VectorXd resid = y - X * beta;
    const double rss = resid.squaredNorm();
    const double sigma2 = rss / static_cast<double>(n - k);
    const Eigen::MatrixXd cov = sigma2 * detail::xtx_inverse(qr);

    RegressionFit fit;
    fit.family = Family::ols;
    fit.n_obs = static_cast<std::size_t>(n);
    for (Eigen::Index j = 0; j < k; ++j) {
        Term t;
        t.name = names[static_cast<std::size_t>(j)];
        t.beta = beta[j];
        t.std_err = std::sqrt(cov(j, j));
        const double tstat = t.std_err > 0.0 ? t.beta / t.std_err : 0.0;
        t.p_value = t.std_err > 0.0
                        ? student_t_two_sided(tstat, static_cast<double>(n - k))
                        : 1.0;
        fit.terms.push_back(std::move(t));
    }

    const double ybar = y.mean();
    const double tss = (y.array() - ybar).matrix().squaredNorm();
    fit.r_squared = tss > 0.0 ? 1.0 - rss / tss : 0.0;

    // Gaussian log-likelihood at the MLE variance rss/n.
    const double nn = static_cast<double>(n);
    const double ll =
        rss > 0.0 ? -0.5 * nn * (std::log(2.0 * M_PI) + std::log(rss / nn) + 1.0)
                  : std::numeric_limits<double>::infinity();
    fit.log_likelihood = ll;
    fit.aic = -2.0 * ll + 2.0 * static_cast<double>(k + 1);
    return fit;
}

struct NegbinOptions {
    int max_iter = 100;
    double tol = 1e-8;        // on the log-likelihood between outer iterations
    double alpha_min = 1e-8;  // Poisson limit
    double alpha_max = 1e6;
};

namespace detail {

inline Eigen::VectorXd mu_from_eta(const Eigen::VectorXd& eta) {
    return eta.array().min(30.0).max(-30.0).exp();
}

// lgamma(theta + y) - lgamma(theta) as an exact finite sum (y is integral),
// avoiding cancellation between two large lgamma values when theta is big.
inline double lgamma_ratio(double theta, double y) {
    double acc = 0.0;
    for (double j = 0.0; j < y - 0.5; j += 1.0) acc += std::log(theta + j);
    return acc;
}

// digamma(theta + y) - digamma(theta), same finite-sum trick.
inline double digamma_ratio(double theta, double y) {
    double acc = 0.0;
    for (double j = 0.0; j < y - 0.5; j += 1.0) acc += 1.0 / (theta + j);
    return acc;
}

inline double negbin_loglik(const Eigen::VectorXd& y, const Eigen::VectorXd& mu,
                            double alpha) {
    const double theta = 1.0 / alpha;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double yi = y[i], mi = mu[i];
        ll += lgamma_ratio(theta, yi) - std::lgamma(yi + 1.0) -
              theta * std::log1p(mi / theta);
        if (yi > 0.0) ll -= yi * std::log1p(theta / mi);
    }
    return ll;
}

// d loglik / d theta at fixed mu; the profile root in theta = 1/alpha.
inline double negbin_theta_score(const Eigen::VectorXd& y, const Eigen::VectorXd& mu,
                                 double theta) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double yi = y[i], mi = mu[i];
        s += digamma_ratio(theta, yi) - std::log1p(mi / theta) + 1.0 -
             (theta + yi) / (theta + mi);
    }
    return s;
}

// One IRLS pass to convergence at fixed alpha. alpha == 0 gives Poisson.
inline Eigen::VectorXd irls_glm(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                Eigen::VectorXd beta, double alpha,
                                int max_iter = 50, double tol = 1e-10) {
    for (int it = 0; it < max_iter; ++it) {
        const Eigen::VectorXd eta = X * beta;
        const Eigen::VectorXd mu = mu_from_eta(eta);
        const Eigen::ArrayXd w = mu.array() / (1.0 + alpha * mu.array());
        const Eigen::VectorXd z = eta.array() + (y.array() - mu.array()) / mu.array();
        const Eigen::MatrixXd xtwx =
            X.transpose() * (w.matrix().asDiagonal() * X);
        const Eigen::VectorXd xtwz = X.transpose() * (w * z.array()).matrix();
        const Eigen::VectorXd next = xtwx.ldlt().solve(xtwz);
        const double delta = (next - beta).cwiseAbs().maxCoeff();
        beta = next;
        if (delta < tol * (1.0 + beta.cwiseAbs().maxCoeff())) break;
    }
    return beta;
}

}  // namespace detail

inline RegressionFit negbin_fit(const Eigen::VectorXd& y, const Eigen::MatrixXd& X,
                                const std::vector<std::string>& names,
                                const NegbinOptions& opts = {}) {
    detail::check_design(y, X, names);
    const Eigen::Index n = X.rows(), k = X.cols();

    double ysum = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double v = y[i];
        if (v < 0.0 || std::fabs(v - std::round(v)) > 1e-9)
            throw std::invalid_argument("negbin_fit: response must be non-negative counts");
        ysum += v;
    }
    if (ysum == 0.0) throw std::invalid_argument("negbin_fit: response is identically zero");

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    detail::check_full_rank(qr, names);

    // Poisson start for the coefficients, method of moments for alpha.
    const double ybar = ysum / static_cast<double>(n);
    const Eigen::VectorXd eta0 = ((y.array() + ybar) / 2.0).log();
    Eigen::VectorXd beta = qr.solve(eta0);
    beta = detail::irls_glm(y, X, beta, 0.0);

    Eigen::VectorXd mu = detail::mu_from_eta(X * beta);
    double moment_num = 0.0, moment_den = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double d = y[i] - mu[i];
        moment_num += d * d - mu[i];
        moment_den += mu[i] * mu[i];
    }
    double alpha = std::clamp(moment_den > 0.0 ? moment_num / moment_den : opts.alpha_min,
                              opts.alpha_min, opts.alpha_max);

    double ll = detail::negbin_loglik(y, mu, alpha);
    std::vector<double> trace{ll};
    bool converged = false;

    for (int outer = 0; outer < opts.max_iter; ++outer) {
        beta = detail::irls_glm(y, X, beta, alpha);
        mu = detail::mu_from_eta(X * beta);

        // Profile the dispersion: root of the theta score, theta = 1/alpha.
        const double theta_lo = 1.0 / opts.alpha_max;
        const double theta_hi = 1.0 / opts.alpha_min;
        const double s_lo = detail::negbin_theta_score(y, mu, theta_lo);
        const double s_hi = detail::negbin_theta_score(y, mu, theta_hi);
        if (s_hi >= 0.0) {
            alpha = opts.alpha_min;  // equidispersed: Poisson limit
        } else if (s_lo <= 0.0) {
            alpha = opts.alpha_max;
        } else {
            auto g = [&](double t) { return detail::negbin_theta_score(y, mu, std::exp(t)); };
            const auto root = brent_root(g, std::log(theta_lo), std::log(theta_hi), 1e-10);
            alpha = std::clamp(1.0 / std::exp(root.x), opts.alpha_min, opts.alpha_max);
        }

        const double ll_new = detail::negbin_loglik(y, mu, alpha);
        trace.push_back(ll_new);
        if (std::fabs(ll_new - ll) < opts.tol) {
            ll = ll_new;
            converged = true;
            break;
        }
        ll = ll_new;
    }
    if (!converged) {
        std::ostringstream msg;
        msg << "negbin_fit did not converge after " << opts.max_iter
            << " iterations (tol " << opts.tol << "); log-likelihood trace:";
        const std::size_t tail = trace.size() > 8 ? trace.size() - 8 : 0;
        for (std::size_t i = tail; i < trace.size(); ++i) msg << ' ' << trace[i];
        throw std::runtime_error(msg.str());
    }

    // Fisher information for beta at fixed alpha: X^T W X, W = mu/(1+alpha*mu).
    const Eigen::ArrayXd w = mu.array() / (1.0 + alpha * mu.array());
    const Eigen::MatrixXd info = X.transpose() * (w.matrix().asDiagonal() * X);
    const Eigen::MatrixXd cov = info.ldlt().solve(Eigen::MatrixXd::Identity(k, k));

    RegressionFit fit;
    fit.family = Family::negative_binomial;
    fit.n_obs = static_cast<std::size_t>(n);
    fit.dispersion = alpha;
    fit.log_likelihood = ll;
    fit.aic = -2.0 * ll + 2.0 * static_cast<double>(k + 1);
    for (Eigen::Index j = 0; j < k; ++j) {
        Term t;
        t.name = names[static_cast<std::size_t>(j)];
        t.beta = beta[j];
        t.std_err = std::sqrt(cov(j, j));
        t.p_value = t.std_err > 0.0 ? normal_two_sided(t.beta / t.std_err) : 1.0;
        t.irr = std::exp(t.beta);
        fit.terms.push_back(std::move(t));
    }
    return fit;
}

// Column-wise design assembly with treatment coding for categoricals.
class DesignBuilder {
public:
    explicit DesignBuilder(std::size_t n) : n_(n) {}

    void add_intercept() { add_numeric("Intercept", std::vector<double>(n_, 1.0)); }

    void add_numeric(const std::string& name, std::vector<double> values) {
        if (values.size() != n_) throw std::invalid_argument("column length mismatch: " + name);
        names_.push_back(name);
        columns_.push_back(std::move(values));
    }

    // One dummy per non-reference level (levels sorted for determinism),
    // named variable[T.level].
    void add_categorical(const std::string& variable,
                         const std::vector<std::string>& values,
                         const std::string& reference) {
        if (values.size() != n_) throw std::invalid_argument("column length mismatch: " + variable);
        std::vector<std::string> levels;
        for (const auto& v : values)
            if (v != reference &&
                std::find(levels.begin(), levels.end(), v) == levels.end())
                levels.push_back(v);
        std::sort(levels.begin(), levels.end());
        for (const auto& level : levels) {
            std::vector<double> col(n_, 0.0);
            for (std::size_t i = 0; i < n_; ++i)
                if (values[i] == level) col[i] = 1.0;
            add_numeric(variable + "[T." + level + "]", std::move(col));
        }
    }

    const std::vector<std::string>& names() const { return names_; }
    std::size_t rows() const { return n_; }

    Eigen::MatrixXd matrix() const {
        Eigen::MatrixXd X(n_, columns_.size());
        for (std::size_t j = 0; j < columns_.size(); ++j)
            for (std::size_t i = 0; i < n_; ++i)
                X(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = columns_[j][i];
        return X;
    }

private:
    std::size_t n_;
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
};

}  // namespace bioaudit::statkit
