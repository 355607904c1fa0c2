// bath.hpp: exponential bath correlation C(t) = (κγ/2) e^{-γ|t|} cos(ω0 t) and derived rates.

#pragma once

#include "aahdiss/core.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace aahdiss {

struct BathSpec {
    double kappa{0.0};   // total weight, ∫_0^∞ C = κ/2 at ω0 = 0
    double gamma{1.0};   // correlation decay rate
    double omega0{0.0};  // correlation oscillation frequency

    void validate() const {
        if (!(kappa >= 0.0)) throw std::invalid_argument("BathSpec: kappa must be >= 0");
        if (!(gamma > 0.0)) throw std::invalid_argument("BathSpec: gamma must be > 0");
        if (!(omega0 >= 0.0)) throw std::invalid_argument("BathSpec: omega0 must be >= 0");
    }
};

// One term c e^{-ν t} of the correlation function (t >= 0).
struct ExponentialMode {
    cplx coefficient;
    cplx rate;
};

inline double correlation(const BathSpec& b, double t) {
    return 0.5 * b.kappa * b.gamma * std::exp(-b.gamma * std::abs(t)) * std::cos(b.omega0 * t);
}

// ω0 = 0 gives a single real mode; otherwise the conjugate pair ν = γ ∓ iω0.
inline std::vector<ExponentialMode> decompose(const BathSpec& b) {
    b.validate();
    if (b.omega0 == 0.0) return {{cplx{0.5 * b.kappa * b.gamma, 0.0}, cplx{b.gamma, 0.0}}};
    const double c = 0.25 * b.kappa * b.gamma;
    return {{cplx{c, 0.0}, cplx{b.gamma, -b.omega0}}, {cplx{c, 0.0}, cplx{b.gamma, b.omega0}}};
}

inline cplx reconstruct_correlation(const std::vector<ExponentialMode>& modes, double t) {
    cplx sum = 0.0;
    for (const auto& m : modes) sum += m.coefficient * std::exp(-m.rate * t);
    return sum;
}

// Symmetrized two-Lorentzian activation rate L(ω); κγ²/(γ²+ω²) at ω0 = 0.
inline double lorentzian_rate(const BathSpec& b, double omega) {
    const double g2 = b.gamma * b.gamma;
    const double wp = omega + b.omega0;
    const double wm = omega - b.omega0;
    return 0.5 * (b.kappa * g2 / (g2 + wp * wp) + b.kappa * g2 / (g2 + wm * wm));
}

// Γ_eff = L(h): bath-activated nearest-neighbour hopping rate used to rescale time.
inline double effective_rate(const BathSpec& b, double h) { return lorentzian_rate(b, h); }

// One-sided transform Γ(ω) = ∫_0^∞ C(t) e^{iωt} dt; Re Γ(ω) = L(ω)/2.
inline cplx half_fourier(const BathSpec& b, double omega) {
    const double pref = 0.25 * b.kappa * b.gamma;
    return pref * (1.0 / cplx{b.gamma, -(omega + b.omega0)} +
                   1.0 / cplx{b.gamma, -(omega - b.omega0)});
}

}  // namespace aahdiss
