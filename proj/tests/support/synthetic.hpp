#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "uptake/timeseries.hpp"

namespace synthetic {

inline uptake::YearMonth ym(int year, int month) { return uptake::YearMonth{year, month}; }

inline std::vector<double> gaussian(std::uint64_t seed, int n, double mean, double sd) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(mean, sd);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& v : out) v = dist(rng);
    return out;
}

inline uptake::MonthlyTimeSeries gaussian_series(std::uint64_t seed, uptake::YearMonth start,
                                                 int n, double mean, double sd) {
    return uptake::MonthlyTimeSeries(start, gaussian(seed, n, mean, sd));
}

// Driver plus response whose coupling flips sign at the plant: y = +rho x
// before, -rho x after, plus independent noise.
struct FlippedPair {
    uptake::MonthlyTimeSeries x;
    uptake::MonthlyTimeSeries y;
    uptake::YearMonth plant;  // first month of the flipped regime
};

inline FlippedPair flipped_pair(std::uint64_t seed, uptake::YearMonth start, int n_before,
                                int n_after, double rho, double noise_sd) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    const int n = n_before + n_after;
    std::vector<double> xs(static_cast<std::size_t>(n)), ys(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        const double x = unit(rng);
        const double sign = t < n_before ? 1.0 : -1.0;
        xs[static_cast<std::size_t>(t)] = x;
        ys[static_cast<std::size_t>(t)] = sign * rho * x + noise_sd * unit(rng);
    }
    return FlippedPair{uptake::MonthlyTimeSeries(start, xs), uptake::MonthlyTimeSeries(start, ys),
                       start.plus(n_before)};
}

inline std::vector<double> seasonal_plus_noise(std::uint64_t seed, int n, double level,
                                               double amplitude, double noise_sd,
                                               int period = 12) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t)
        out[static_cast<std::size_t>(t)] =
            level + amplitude * std::sin(2.0 * M_PI * t / period) + noise_sd * unit(rng);
    return out;
}

// Periodic signal whose annual pattern drifts: each month follows last year's
// value with persistence phi, seeded by one sinusoidal period. The lag-12
// autocorrelation is phi while the innovations stay white.
inline std::vector<double> seasonal_ar(std::uint64_t seed, int n, double level, double amplitude,
                                       double phi, double noise_sd, int period = 12) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int t = 0; t < n; ++t) {
        const double base =
            t < period ? amplitude * std::sin(2.0 * M_PI * t / period)
                       : phi * (out[static_cast<std::size_t>(t - period)] - level);
        out[static_cast<std::size_t>(t)] = level + base + noise_sd * unit(rng);
    }
    return out;
}

}  // namespace synthetic
