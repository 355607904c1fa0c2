// observables.hpp: transport diagnostics: RMSD, participation ratio, l1-coherence, power-law fits.

#pragma once

#include "aahdiss/bath.hpp"
#include "aahdiss/core.hpp"
#include "aahdiss/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace aahdiss {

struct TransportSample {
    double sigma{0.0};  // sqrt(Σ_j (j - j0)² P_j)
    double ppr{1.0};    // (Σ_j P_j²)^{-1}
    double l1{0.0};     // Σ_{i≠j} |ρ_ij|
};

// σ from site populations (1-based sites).
inline double rmsd(const RealVector& p, int j0) {
    double s = 0.0;
    for (Eigen::Index j = 0; j < p.size(); ++j) {
        const double d = static_cast<double>(j + 1 - j0);
        s += d * d * p(j);
    }
    return std::sqrt(std::max(s, 0.0));
}

inline double participation_ratio(const RealVector& p) { return 1.0 / p.squaredNorm(); }

inline double l1_coherence(const DensityMatrix& rho) {
    return rho.cwiseAbs().sum() - rho.diagonal().cwiseAbs().sum();
}

inline TransportSample transport_observables(const DensityMatrix& rho, int j0) {
    const RealVector p = rho.diagonal().real();
    return {rmsd(p, j0), participation_ratio(p), l1_coherence(rho)};
}

inline RealMatrix coherence_snapshot(const DensityMatrix& rho) { return rho.cwiseAbs(); }

struct PowerLawFit {
    double D{0.0};
    double alpha{0.0};
    double residual{0.0};  // RMS residual of log σ
    std::size_t points{0};
};

// Least squares on log y = log D + α log t over t ∈ [t_lo, t_hi].
inline PowerLawFit power_law_fit(std::span<const double> t, std::span<const double> y, double t_lo,
                                 double t_hi) {
    if (t.size() != y.size()) throw std::invalid_argument("power_law_fit: length mismatch");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi) continue;
        if (!(t[i] > 0.0)) throw std::invalid_argument("power_law_fit: non-positive time in window");
        if (!(y[i] > 0.0)) throw std::invalid_argument("power_law_fit: non-positive value in window");
        xs.push_back(std::log(t[i]));
        ys.push_back(std::log(y[i]));
    }
    if (xs.empty()) throw std::invalid_argument("power_law_fit: window is empty");
    if (xs.size() < 10) throw std::invalid_argument("power_law_fit: fewer than 10 points in window");

    const double n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    if (sxx == 0.0) throw std::invalid_argument("power_law_fit: degenerate time window");
    PowerLawFit fit;
    fit.alpha = sxy / sxx;
    const double logD = my - fit.alpha * mx;
    fit.D = std::exp(logD);
    double ss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (logD + fit.alpha * xs[i]);
        ss += r * r;
    }
    fit.residual = std::sqrt(ss / n);
    fit.points = xs.size();
    return fit;
}

// t̃ = Γ_eff t with Γ_eff = L(h).
inline std::vector<double> rescale_time(std::span<const double> t, const BathSpec& b, double h) {
    const double rate = effective_rate(b, h);
    std::vector<double> out(t.begin(), t.end());
    for (auto& x : out) x *= rate;
    return out;
}

// Centered moving average over `width` neighbouring samples (log-spaced grids give a
// log-time window); the window shrinks symmetrically at the edges.
inline std::vector<double> moving_average(std::span<const double> y, int width = 5) {
    if (width < 1) throw std::invalid_argument("moving_average: width must be >= 1");
    const auto n = static_cast<std::ptrdiff_t>(y.size());
    const std::ptrdiff_t half = width / 2;
    std::vector<double> out(y.size());
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t r = std::min({half, i, n - 1 - i});
        double s = 0.0;
        for (std::ptrdiff_t k = i - r; k <= i + r; ++k) s += y[static_cast<std::size_t>(k)];
        out[static_cast<std::size_t>(i)] = s / static_cast<double>(2 * r + 1);
    }
    return out;
}

struct TransportReport {
    std::vector<double> times;
    std::vector<double> rescaled_times;
    std::vector<double> sigma;
    std::vector<double> sigma_filtered;
    std::vector<double> ppr;
    std::vector<double> l1;
    double rate{1.0};  // Γ_eff used for t̃
};

inline TransportReport transport_report(const Trajectory& traj, int j0, double rate = 1.0,
                                        int filter_width = 5) {
    TransportReport r;
    r.rate = rate;
    r.times = traj.times;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto s = transport_observables(traj.states[i], j0);
        r.rescaled_times.push_back(rate * traj.times[i]);
        r.sigma.push_back(s.sigma);
        r.ppr.push_back(s.ppr);
        r.l1.push_back(s.l1);
    }
    r.sigma_filtered = moving_average(r.sigma, filter_width);
    return r;
}

// Linear interpolation in log-log space; used to compare curves on different grids.
inline double loglog_interpolate(std::span<const double> t, std::span<const double> y, double at) {
    if (t.size() != y.size() || t.size() < 2) throw std::invalid_argument("loglog_interpolate: bad series");
    if (at < t.front() || at > t.back()) throw std::out_of_range("loglog_interpolate: outside series");
    auto it = std::upper_bound(t.begin(), t.end(), at);
    std::size_t hi = static_cast<std::size_t>(std::distance(t.begin(), it));
    if (hi >= t.size()) hi = t.size() - 1;
    if (hi == 0) hi = 1;
    const std::size_t lo = hi - 1;
    if (t[lo] <= 0.0 || y[lo] <= 0.0 || y[hi] <= 0.0) {
        const double w = (at - t[lo]) / (t[hi] - t[lo]);
        return y[lo] + w * (y[hi] - y[lo]);
    }
    const double w = (std::log(at) - std::log(t[lo])) / (std::log(t[hi]) - std::log(t[lo]));
    return std::exp(std::log(y[lo]) + w * (std::log(y[hi]) - std::log(y[lo])));
}

}  // namespace aahdiss
