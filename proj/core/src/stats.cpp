#include "uptake/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace uptake {

namespace detail {

namespace {

// Continued fraction for the incomplete beta, modified Lentz iteration.
// Converges in a few dozen terms for the x < (a+1)/(a+b+2) branch.
double betacf(double a, double b, double x) {
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 3e-16;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 500; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) return h;
    }
    throw NotConverged("incomplete beta continued fraction stalled at a=" + std::to_string(a) +
                       " b=" + std::to_string(b) + " x=" + std::to_string(x));
}

}  // namespace

double ibeta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw PreconditionError("ibeta requires a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
    return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

}  // namespace detail

double t_sf(double t, int df) {
    if (df < 1) throw PreconditionError("t_sf requires df >= 1");
    if (std::isnan(t)) throw PreconditionError("t_sf requires finite t");
    if (std::isinf(t)) return 0.0;
    if (t == 0.0) return 1.0;
    const double x = df / (df + t * t);
    return std::clamp(detail::ibeta(df / 2.0, 0.5, x), 0.0, 1.0);
}

double t_critical(double alpha, int df) {
    if (df < 1) throw PreconditionError("t_critical requires df >= 1");
    if (!(alpha > 0.0) || !(alpha < 1.0))
        throw PreconditionError("t_critical requires alpha in (0,1)");
    double hi = 1.0;
    while (t_sf(hi, df) > alpha) {
        hi *= 2.0;
        if (hi > 1e12) break;
    }
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (t_sf(mid, df) > alpha)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

CorrelationResult pearson_r(std::span<const double> x, std::span<const double> y, TailKind tail) {
    if (x.size() != y.size())
        throw LengthMismatch("pearson_r: " + std::to_string(x.size()) + " vs " +
                             std::to_string(y.size()) + " points");
    const int n = static_cast<int>(x.size());
    if (n < 3) throw TooShort("pearson_r requires n >= 3, got " + std::to_string(n));

    double mx = 0.0, my = 0.0;
    for (int i = 0; i < n; ++i) {
        mx += x[static_cast<std::size_t>(i)];
        my += y[static_cast<std::size_t>(i)];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        const double dx = x[static_cast<std::size_t>(i)] - mx;
        const double dy = y[static_cast<std::size_t>(i)] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx <= 0.0) throw ConstantInput("pearson_r: first argument has zero variance");
    if (syy <= 0.0) throw ConstantInput("pearson_r: second argument has zero variance");

    const double r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
    const int df = n - 2;
    double p;
    if (std::fabs(r) >= 1.0) {
        p = 0.0;
    } else {
        const double t = r * std::sqrt(df / (1.0 - r * r));
        p = t_sf(t, df);
    }
    if (tail == TailKind::one_sided) p *= 0.5;
    return CorrelationResult{r, n, p};
}

RegressionFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
    const Eigen::Index n = X.rows();
    const Eigen::Index k = X.cols();
    if (y.size() != n)
        throw LengthMismatch("ols: X has " + std::to_string(n) + " rows, y has " +
                             std::to_string(y.size()));
    if (k < 1) throw PreconditionError("ols requires at least one regressor");
    if (n <= k)
        throw TooFewRows("ols requires n > k, got n=" + std::to_string(n) +
                         " k=" + std::to_string(k));

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < k)
        throw RankDeficient("ols: design matrix rank " + std::to_string(qr.rank()) + " < " +
                            std::to_string(k));

    RegressionFit fit;
    fit.n = static_cast<int>(n);
    fit.coefficients = qr.solve(y);

    const Eigen::VectorXd resid = y - X * fit.coefficients;
    const double rss = resid.squaredNorm();
    const double sigma2 = rss / static_cast<double>(n - k);

    // X P = Q R, so (X^T X)^-1 = P R^-1 R^-T P^T; R is k x k upper triangular
    // because rank was verified above.
    const Eigen::MatrixXd R =
        qr.matrixR().topLeftCorner(k, k).template triangularView<Eigen::Upper>();
    const Eigen::MatrixXd Rinv =
        R.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    const Eigen::MatrixXd xtx_inv =
        qr.colsPermutation() * (Rinv * Rinv.transpose()) * qr.colsPermutation().transpose();

    fit.std_errors.resize(k);
    fit.t_stats.resize(k);
    fit.p_values.resize(k);
    const int df = static_cast<int>(n - k);
    for (Eigen::Index i = 0; i < k; ++i) {
        fit.std_errors[i] = std::sqrt(std::max(0.0, sigma2 * xtx_inv(i, i)));
        if (fit.std_errors[i] > 0.0) {
            fit.t_stats[i] = fit.coefficients[i] / fit.std_errors[i];
            fit.p_values[i] = t_sf(fit.t_stats[i], df);
        } else {
            // Exact fit: the coefficient is determined with zero residual.
            fit.t_stats[i] = fit.coefficients[i] == 0.0
                                 ? 0.0
                                 : std::numeric_limits<double>::infinity() *
                                       (fit.coefficients[i] > 0 ? 1.0 : -1.0);
            fit.p_values[i] = fit.coefficients[i] == 0.0 ? 1.0 : 0.0;
        }
    }

    const double tss = (y.array() - y.mean()).square().sum();
    fit.r_squared = tss > 0.0 ? std::clamp(1.0 - rss / tss, 0.0, 1.0) : 0.0;
    return fit;
}

}  // namespace uptake
