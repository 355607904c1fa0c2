// semiclassical.hpp: incoherent hopping between localized eigenstates driven by coloured noise.
//
// Rates (state n -> state m, written Γ_mn):
//   Γ_mn = w_m w_n / 2 · [ gγ²/(γ² + (Δ+ω0)²) + gγ²/(γ² + (Δ-ω0)²) ],  Δ = ε_n - ε_m,
// where w_n = |φ_n(j0)|² is the weight of state n on the noisy site. In the deep-localized
// model φ_n(j) = e^{-|j-n|/ξ}/𝒩_n (𝒩_n normalizes over the finite chain) and ε_n = V_n.

#pragma once

#include "aahdiss/bath.hpp"
#include "aahdiss/core.hpp"
#include "aahdiss/integrator.hpp"
#include "aahdiss/lattice.hpp"
#include "aahdiss/observables.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace aahdiss {

enum class LocalizationModel { deep, exact };

struct RateMatrix {
    RealMatrix rates;           // rates(m, n) = Γ_mn, flow n -> m
    RealVector energies;        // ε_n used for the Bohr gaps
    RealVector weights;         // w_n = |φ_n(j0)|²
    std::vector<int> sites;     // site label of state n (1-based)
    double g{0.0};
    double gamma{1.0};
    double omega0{0.0};
    double xi{0.0};
    int j0{0};
    LocalizationModel model{LocalizationModel::deep};

    int dim() const noexcept { return static_cast<int>(rates.rows()); }

    // M_mn = Γ_mn - δ_mn Σ_k Γ_km
    RealMatrix generator() const {
        RealMatrix m = rates;
        for (int n = 0; n < dim(); ++n) m(n, n) -= rates.col(n).sum();
        return m;
    }
};

// Noise-activation factor shared by both models.
inline double activation(double delta, double g, double gamma, double omega0) {
    const double g2 = gamma * gamma;
    return g * g2 / (g2 + (delta + omega0) * (delta + omega0)) +
           g * g2 / (g2 + (delta - omega0) * (delta - omega0));
}

namespace detail {

inline RateMatrix assemble_rates(RealVector energies, RealVector weights, std::vector<int> sites,
                                 double g, const BathSpec& b) {
    RateMatrix R;
    const auto n = energies.size();
    R.rates = RealMatrix::Zero(n, n);
    for (Eigen::Index m = 0; m < n; ++m)
        for (Eigen::Index k = 0; k < n; ++k) {
            if (m == k) continue;
            R.rates(m, k) = 0.5 * weights(m) * weights(k) *
                            activation(energies(k) - energies(m), g, b.gamma, b.omega0);
        }
    R.energies = std::move(energies);
    R.weights = std::move(weights);
    R.sites = std::move(sites);
    R.g = g;
    R.gamma = b.gamma;
    R.omega0 = b.omega0;
    return R;
}

}  // namespace detail

// Envelope weights e^{-2|j0-n|/ξ}/𝒩_n² for states centred on each site n.
inline RealVector envelope_weights(int L, int j0, double xi) {
    RealVector w(L);
    for (int n = 1; n <= L; ++n) {
        double norm2 = 0.0;
        for (int j = 1; j <= L; ++j) norm2 += std::exp(-2.0 * std::abs(j - n) / xi);
        w(n - 1) = std::exp(-2.0 * std::abs(j0 - n) / xi) / norm2;
    }
    return w;
}

inline RateMatrix transition_rates(const ChainSpec& chain, const BathSpec& b, double g,
                                   LocalizationModel model = LocalizationModel::deep) {
    chain.validate();
    b.validate();
    if (!(g >= 0.0)) throw std::invalid_argument("transition_rates: g must be >= 0");
    const double xi = localization_length(chain.h, chain.J);
    const int L = chain.L;
    const int j0 = chain.center();

    RateMatrix R;
    if (model == LocalizationModel::deep) {
        RealVector eps(L);
        std::vector<int> sites(L);
        for (int n = 1; n <= L; ++n) {
            eps(n - 1) = chain.potential(n);
            sites[n - 1] = n;
        }
        R = detail::assemble_rates(std::move(eps), envelope_weights(L, j0, xi), std::move(sites), g, b);
    } else {
        const auto eig = diagonalize(build_aah_hamiltonian(chain));
        RealVector w = eig.vectors.row(j0 - 1).transpose().array().square();
        R = detail::assemble_rates(eig.energies, std::move(w), eig.centers, g, b);
    }
    R.xi = xi;
    R.j0 = j0;
    R.model = model;
    return R;
}

// Γ_eff^(CL) = ½[10gγ²/(γ²+(h+ω0)²) + 10gγ²/(γ²+(h-ω0)²)]; equals L(h) when g = κ/10.
inline double effective_rate_cl(double g, double gamma, double h, double omega0 = 0.0) {
    return lorentzian_rate(BathSpec{10.0 * g, gamma, omega0}, h);
}

// J_Δ(t) = ∫_0^t∫_0^t e^{-γ|t'-t''|} e^{iΔ(t'-t'')} dt' dt''; the linear term 2γt/(γ²+Δ²)
// is the Markov-rate limit used by the rate equation.
inline double transition_integral(double delta, double gamma, double t) {
    const double s = gamma * gamma + delta * delta;
    const double e = std::exp(-gamma * t);
    return 2.0 * gamma * t / s + 2.0 * (delta * delta - gamma * gamma) / (s * s) -
           2.0 * (delta * delta - gamma * gamma) * e * std::cos(delta * t) / (s * s) -
           4.0 * delta * gamma * e * std::sin(delta * t) / (s * s);
}

struct PopulationTrajectory {
    std::vector<double> times;
    std::vector<RealVector> populations;  // per state
    std::vector<int> sites;               // site label of each state

    // Populations folded onto sites (states sharing a centre are summed).
    RealVector site_populations(std::size_t i, int L) const {
        RealVector p = RealVector::Zero(L);
        const auto& q = populations.at(i);
        for (Eigen::Index n = 0; n < q.size(); ++n) p(sites[static_cast<std::size_t>(n)] - 1) += q(n);
        return p;
    }
};

inline PopulationTrajectory evolve_rate_equation(const RateMatrix& R, const RealVector& p0,
                                                 std::span<const double> times,
                                                 const IntegratorOptions& opt = {}) {
    if (p0.size() != R.dim()) throw std::invalid_argument("evolve_rate_equation: size mismatch");
    if ((p0.array() < 0.0).any() || std::abs(p0.sum() - 1.0) > 1e-10)
        throw std::invalid_argument("evolve_rate_equation: p0 must be a probability vector");
    if ((R.rates.array() < 0.0).any())
        throw std::invalid_argument("evolve_rate_equation: negative rate");
    check_times(std::vector<double>(times.begin(), times.end()));

    PopulationTrajectory out;
    out.sites = R.sites;
    const RealMatrix M = R.generator();
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());

    if ((M - M.transpose()).cwiseAbs().maxCoeff() <= 1e-14 * scale) {
        // Symmetric generator: exact propagator V e^{Λ(t-t0)} Vᵀ.
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(M);
        const RealMatrix& V = es.eigenvectors();
        const RealVector c = V.transpose() * p0;
        for (double t : times) {
            const double dt = t - times.front();
            RealVector p = dt == 0.0 ? p0
                                     : RealVector(V * (es.eigenvalues().array() * dt).exp().matrix()
                                                          .cwiseProduct(c));
            out.times.push_back(t);
            out.populations.push_back(std::move(p));
        }
        return out;
    }

    auto rhs = [&M](double, const RealVector& x, RealVector& dx) { dx.noalias() = M * x; };
    integrate(rhs, p0, times, opt, [&](std::size_t, double t, const RealVector& y) {
        out.times.push_back(t);
        out.populations.push_back(y);
    });
    return out;
}

// D(t) = ½ Σ_j |P_j - P_j^(CL)|
inline double distance_heom_semiclassical(const RealVector& p_heom, const RealVector& p_cl) {
    if (p_heom.size() != p_cl.size())
        throw std::invalid_argument("distance_heom_semiclassical: length mismatch");
    return 0.5 * (p_heom - p_cl).cwiseAbs().sum();
}

inline std::vector<double> distance_series(const std::vector<RealVector>& heom,
                                           const std::vector<RealVector>& cl) {
    if (heom.size() != cl.size()) throw std::invalid_argument("distance_series: length mismatch");
    std::vector<double> d(heom.size());
    for (std::size_t i = 0; i < heom.size(); ++i) d[i] = distance_heom_semiclassical(heom[i], cl[i]);
    return d;
}

struct CalibrationPoint {
    double c{0.0};
    double mean_distance{0.0};
};

// Scans g = cκ and reports the time-averaged D_HEOM,CL for each c against HEOM site
// populations sampled at `times`.
inline std::vector<CalibrationPoint> calibration_scan(const std::vector<RealVector>& heom_populations,
                                                      std::span<const double> times,
                                                      const ChainSpec& chain, const BathSpec& b,
                                                      std::span<const double> c_values,
                                                      LocalizationModel model = LocalizationModel::deep) {
    if (heom_populations.size() != times.size())
        throw std::invalid_argument("calibration_scan: populations/times mismatch");
    std::vector<CalibrationPoint> out;
    for (double c : c_values) {
        const auto R = transition_rates(chain, b, c * b.kappa, model);
        RealVector p0 = RealVector::Zero(R.dim());
        for (int n = 0; n < R.dim(); ++n)
            if (R.sites[n] == chain.center()) {
                p0(n) = 1.0;
                break;
            }
        const auto traj = evolve_rate_equation(R, p0, times);
        double acc = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i)
            acc += distance_heom_semiclassical(heom_populations[i], traj.site_populations(i, chain.L));
        out.push_back({c, acc / static_cast<double>(times.size())});
    }
    return out;
}

}  // namespace aahdiss
