// markovian.hpp: Lindblad and non-secular Bloch-Redfield generators on the physical L² space.

#pragma once

#include "aahdiss/bath.hpp"
#include "aahdiss/core.hpp"
#include "aahdiss/generator.hpp"
#include "aahdiss/heom.hpp"
#include "aahdiss/lattice.hpp"
#include "aahdiss/trajectory.hpp"

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace aahdiss {

// L[ρ] = -i[H,ρ] + κ (AρA - ½{A,ρ}),  A = |j0><j0|.
inline Generator build_lindblad(const Hamiltonian& H, const BathSpec& b) {
    b.validate();
    const int L = H.dim();
    const ComplexMatrix Hc = H.complex_matrix();
    const ComplexMatrix A = site_projector(L, H.center());
    const ComplexMatrix Id = ComplexMatrix::Identity(L, L);

    detail::Triplets trips;
    detail::add_commutator(trips, Hc, -I, 0, 0);
    if (b.kappa != 0.0) {
        detail::add_sandwich(trips, A, A, b.kappa, 0, 0);
        detail::add_sandwich(trips, A, Id, -0.5 * b.kappa, 0, 0);
        detail::add_sandwich(trips, Id, A, -0.5 * b.kappa, 0, 0);
    }
    const auto dim = static_cast<std::size_t>(L) * static_cast<std::size_t>(L);
    return Generator(GeneratorKind::lindblad, detail::assemble(trips, dim), L, 1, b, 0);
}

// Half-Fourier rates Γ(ε_n - ε_m) keyed by eigenpair (m, n).
inline ComplexMatrix half_fourier_rates(const EigenDecomposition& eig, const BathSpec& b) {
    const int L = eig.dim();
    ComplexMatrix g(L, L);
    for (int m = 0; m < L; ++m)
        for (int n = 0; n < L; ++n) g(m, n) = half_fourier(b, eig.energies(n) - eig.energies(m));
    return g;
}

// Full Redfield tensor, ρ̇ = -i[H,ρ] - [A, Λρ] + [A, ρΛ†] with Λ_mn = A_mn Γ(ε_n - ε_m)
// in the energy basis; assembled in the site basis.
inline Generator build_bloch_redfield(const Hamiltonian& H, const BathSpec& b) {
    b.validate();
    const int L = H.dim();
    const auto eig = diagonalize(H);
    const ComplexMatrix U = eig.vectors.cast<cplx>();
    const ComplexMatrix A = site_projector(L, H.center());
    const ComplexMatrix A_eig = U.adjoint() * A * U;
    const ComplexMatrix Lambda_eig = A_eig.cwiseProduct(half_fourier_rates(eig, b));
    const ComplexMatrix Lambda = U * Lambda_eig * U.adjoint();
    const ComplexMatrix Lambda_dag = Lambda.adjoint();
    const ComplexMatrix Id = ComplexMatrix::Identity(L, L);

    detail::Triplets trips;
    detail::add_commutator(trips, H.complex_matrix(), -I, 0, 0);
    if (b.kappa != 0.0) {
        const ComplexMatrix AL = A * Lambda;
        const ComplexMatrix LdA = Lambda_dag * A;
        detail::add_sandwich(trips, AL, Id, -1.0, 0, 0);
        detail::add_sandwich(trips, Lambda, A, 1.0, 0, 0);
        detail::add_sandwich(trips, A, Lambda_dag, 1.0, 0, 0);
        detail::add_sandwich(trips, Id, LdA, -1.0, 0, 0);
    }
    const auto dim = static_cast<std::size_t>(L) * static_cast<std::size_t>(L);
    return Generator(GeneratorKind::redfield, detail::assemble(trips, dim), L, 1, b, 0);
}

namespace detail {

// Square root of a Hermitian PSD matrix; eigenvalues in [-tol, 0) are zeroed.
inline ComplexMatrix psd_sqrt(const DensityMatrix& rho, double tol) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(rho));
    RealVector ev = es.eigenvalues();
    if (ev.minCoeff() < -tol)
        throw domain_error("fidelity: state has eigenvalue " + std::to_string(ev.minCoeff()) +
                           " below the positivity tolerance");
    ev = ev.cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

// Uhlmann fidelity F = (tr sqrt(sqrt(ρ) σ sqrt(ρ)))².
inline double uhlmann_fidelity(const DensityMatrix& rho, const DensityMatrix& sigma, double tol = 1e-6) {
    if (rho.rows() != sigma.rows()) throw std::invalid_argument("fidelity: dimension mismatch");
    const ComplexMatrix s = detail::psd_sqrt(rho, tol);
    detail::psd_sqrt(sigma, tol);  // positivity check only
    const ComplexMatrix m = hermitian_part(s * hermitian_part(sigma) * s);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
    const double tr = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
    return tr * tr;
}

inline std::vector<double> fidelity_series(const Trajectory& a, const Trajectory& b) {
    if (a.size() != b.size()) throw std::invalid_argument("fidelity_series: length mismatch");
    std::vector<double> f(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) f[i] = uhlmann_fidelity(a.states[i], b.states[i]);
    return f;
}

struct MarkovianComparison {
    Trajectory heom;
    Trajectory redfield;
    std::vector<double> fidelity;
};

inline MarkovianComparison fidelity_heom_vs_br(const Hamiltonian& H, const BathSpec& b,
                                               const DensityMatrix& rho0, std::span<const double> times,
                                               TierSpec tier, const IntegratorOptions& opt = {}) {
    MarkovianComparison out;
    out.heom = evolve(build_heom_generator(H, b, tier), rho0, times, opt);
    out.redfield = evolve(build_bloch_redfield(H, b), rho0, times, opt);
    out.fidelity = fidelity_series(out.heom, out.redfield);
    return out;
}

}  // namespace aahdiss
