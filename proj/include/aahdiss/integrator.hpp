// integrator.hpp: adaptive Dormand–Prince 5(4) stepping for linear/nonlinear ODE systems.
//
// Works on any Eigen column vector type. Output times are hit exactly (steps are
// clipped to land on them) so results are reproducible for a fixed tolerance pair.

#pragma once

#include "aahdiss/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>

namespace aahdiss {

struct IntegratorOptions {
    double rtol{1e-8};
    double atol{1e-10};
    double initial_step{0.0};      // 0: automatic
    double max_step{0.0};          // 0: unbounded
    double min_step_factor{1e-13};  // underflow when h < factor * max(1,|t|)
    std::size_t max_steps{200'000'000};
};

struct IntegratorStats {
    std::size_t accepted{0};
    std::size_t rejected{0};
    std::size_t rhs_evaluations{0};
};

namespace detail {

// Dormand–Prince tableau.
struct DoPri5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                            a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    // error coefficients b - b*
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

template <class Vec>
double error_norm(const Vec& err, const Vec& y0, const Vec& y1, double rtol, double atol) {
    const auto n = err.size();
    if (n == 0) return 0.0;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double sc = atol + rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        const double r = std::abs(err[i]) / sc;
        acc += r * r;
    }
    return std::sqrt(acc / static_cast<double>(n));
}

}  // namespace detail

// Integrates dy/dt = rhs(t, y, dy) from times.front() through each entry of `times`
// (ascending), calling observer(index, t, y) at every requested time. The first call
// receives the initial state unchanged.
template <class Vec, class Rhs, class Observer>
IntegratorStats integrate(Rhs&& rhs, Vec y, std::span<const double> times,
                          const IntegratorOptions& opt, Observer&& observer) {
    using T = detail::DoPri5;
    IntegratorStats stats;
    if (times.empty()) return stats;
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("integrate: output times must be strictly ascending");
    if (!(opt.rtol > 0.0) || !(opt.atol > 0.0))
        throw std::invalid_argument("integrate: tolerances must be positive");

    double t = times[0];
    observer(std::size_t{0}, t, static_cast<const Vec&>(y));
    if (times.size() == 1) return stats;

    const auto n = y.size();
    Vec k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
    rhs(t, y, k1);
    ++stats.rhs_evaluations;

    double h = opt.initial_step;
    if (h <= 0.0) {
        // Hairer's starting-step heuristic.
        const double d0 = detail::error_norm(y, y, y, opt.rtol, opt.atol);
        const double d1 = detail::error_norm(k1, y, y, opt.rtol, opt.atol);
        double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        ytmp = y + h0 * k1;
        rhs(t + h0, ytmp, k2);
        ++stats.rhs_evaluations;
        err = k2 - k1;
        const double d2 = detail::error_norm(err, y, y, opt.rtol, opt.atol) / h0;
        const double h1 = (std::max(d1, d2) <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                                     : std::pow(0.01 / std::max(d1, d2), 0.2);
        h = std::min(100.0 * h0, h1);
    }
    if (opt.max_step > 0.0) h = std::min(h, opt.max_step);

    std::size_t next = 1;
    std::size_t steps = 0;
    while (next < times.size()) {
        const double target = times[next];
        bool landing = false;
        double h_try = h;
        if (t + h_try >= target) {
            h_try = target - t;
            landing = true;
        }
        if (h_try < opt.min_step_factor * std::max(1.0, std::abs(t)))
            throw stiffness_error("integrate: step size underflow", t);
        if (++steps > opt.max_steps) throw integration_error("integrate: step budget exhausted", t);

        ytmp = y + h_try * (T::a21 * k1);
        rhs(t + T::c2 * h_try, ytmp, k2);
        ytmp = y + h_try * (T::a31 * k1 + T::a32 * k2);
        rhs(t + T::c3 * h_try, ytmp, k3);
        ytmp = y + h_try * (T::a41 * k1 + T::a42 * k2 + T::a43 * k3);
        rhs(t + T::c4 * h_try, ytmp, k4);
        ytmp = y + h_try * (T::a51 * k1 + T::a52 * k2 + T::a53 * k3 + T::a54 * k4);
        rhs(t + T::c5 * h_try, ytmp, k5);
        ytmp = y + h_try * (T::a61 * k1 + T::a62 * k2 + T::a63 * k3 + T::a64 * k4 + T::a65 * k5);
        rhs(t + h_try, ytmp, k6);
        ynew = y + h_try * (T::a71 * k1 + T::a73 * k3 + T::a74 * k4 + T::a75 * k5 + T::a76 * k6);
        rhs(t + h_try, ynew, k7);
        stats.rhs_evaluations += 6;

        err = h_try * (T::e1 * k1 + T::e3 * k3 + T::e4 * k4 + T::e5 * k5 + T::e6 * k6 + T::e7 * k7);
        const double en = detail::error_norm(err, y, ynew, opt.rtol, opt.atol);
        if (!std::isfinite(en)) throw integration_error("integrate: non-finite state", t);

        const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
        if (en <= 1.0) {
            ++stats.accepted;
            t = landing ? target : t + h_try;
            y.swap(ynew);
            k1.swap(k7);  // FSAL
            if (landing) {
                observer(next, t, static_cast<const Vec&>(y));
                ++next;
                // A clipped landing step says nothing about the natural step size.
                if (h_try < h) continue;
            }
            h = h_try * fac;
        } else {
            ++stats.rejected;
            h = h_try * std::max(0.2, fac);
        }
        if (opt.max_step > 0.0) h = std::min(h, opt.max_step);
    }
    return stats;
}

}  // namespace aahdiss
