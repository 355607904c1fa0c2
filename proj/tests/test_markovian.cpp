#include "aahdiss/heom.hpp"
#include "aahdiss/markovian.hpp"
#include "aahdiss/spectrum.hpp"

#include <catch_amalgamated.hpp>

using namespace aahdiss;
using Catch::Approx;

namespace {

std::vector<double> linear_times(double t_max, int n) {
    std::vector<double> t;
    for (int i = 0; i <= n; ++i) t.push_back(t_max * i / n);
    return t;
}

}  // namespace

TEST_CASE("Lindblad dephasing of a two-site coherence", "[markovian]") {
    RealMatrix h = RealMatrix::Zero(3, 3);
    const auto H = Hamiltonian::from_matrix(h);
    DensityMatrix rho0 = DensityMatrix::Constant(3, 3, cplx{1.0 / 3.0});
    const auto traj = evolve(build_lindblad(H, {2.0, 1.0, 0.0}), rho0, linear_times(2.0, 4));
    for (std::size_t k = 0; k < traj.size(); ++k) {
        CHECK(traj.states[k](0, 1).real() == Approx(std::exp(-traj.times[k]) / 3.0).epsilon(1e-7));
        CHECK(traj.states[k](0, 2).real() == Approx(1.0 / 3.0).epsilon(1e-9));
    }
}

TEST_CASE("generators annihilate the trace", "[markovian]") {
    const auto H = build_aah_hamiltonian({7, 1.0, 3.0});
    for (const auto& g : {build_lindblad(H, {2.0, 2.0, 0.0}), build_bloch_redfield(H, {2.0, 2.0, 1.0})}) {
        const ComplexMatrix D = g.dense();
        for (Eigen::Index col = 0; col < D.cols(); ++col) {
            cplx s = 0.0;
            for (int a = 0; a < 7; ++a) s += D(a + 7 * a, col);
            CHECK(std::abs(s) < 1e-12);
        }
    }
}

TEST_CASE("Bloch-Redfield relaxation of a two-level system", "[markovian]") {
    // Degenerate pair coupled through site 2: populations relax as 1/2 (1 + e^{-2rt}).
    RealMatrix h = RealMatrix::Zero(3, 3);
    h(0, 1) = h(1, 0) = 1.0;
    h(2, 2) = 50.0;
    // Oracle from the Lindblad limit (γ → ∞), where both generators coincide.
    const auto H = Hamiltonian::from_matrix(h);
    const BathSpec b{0.2, 1e6, 0.0};
    const auto times = linear_times(10.0, 10);
    const auto br = evolve(build_bloch_redfield(H, b), site_projector(3, 1), times);
    const auto li = evolve(build_lindblad(H, b), site_projector(3, 1), times);
    for (std::size_t k = 0; k < times.size(); ++k) CHECK(trace_distance(br.states[k], li.states[k]) < 1e-4);
}

TEST_CASE("fidelity", "[markovian]") {
    const DensityMatrix a = site_projector(3, 1);
    DensityMatrix mixed = DensityMatrix::Identity(3, 3) / 3.0;
    CHECK(uhlmann_fidelity(a, a) == Approx(1.0));
    CHECK(uhlmann_fidelity(a, site_projector(3, 2)) == Approx(0.0).margin(1e-12));
    CHECK(uhlmann_fidelity(a, mixed) == Approx(1.0 / 3.0));
    CHECK(uhlmann_fidelity(mixed, a) == Approx(1.0 / 3.0));
    DensityMatrix neg = DensityMatrix::Zero(2, 2);
    neg(0, 0) = 1.1;
    neg(1, 1) = -0.1;
    CHECK_THROWS_AS(uhlmann_fidelity(neg, neg), aahdiss::domain_error);
}

TEST_CASE("HEOM approaches Lindblad at short bath memory", "[markovian]") {
    const auto H = build_aah_hamiltonian({7, 1.0, 3.0});
    const BathSpec b{2.0, 200.0, 0.0};
    const auto times = linear_times(5.0, 10);
    const auto heom = evolve(build_heom_generator(H, b, {3}), site_projector(7, 4), times);
    const auto lind = evolve(build_lindblad(H, b), site_projector(7, 4), times);
    for (double f : fidelity_series(heom, lind)) CHECK(f > 0.999);
}

TEST_CASE("HEOM and Bloch-Redfield agree deep in the localized phase", "[markovian]") {
    const auto H = build_aah_hamiltonian({9, 1.0, 10.0});
    const auto cmp = fidelity_heom_vs_br(H, {2.0, 5.0, 0.0}, site_projector(9, 5), linear_times(10.0, 10), {5});
    CHECK(*std::min_element(cmp.fidelity.begin(), cmp.fidelity.end()) > 0.99);
}

TEST_CASE("Lindblad eigenvalues lie in the closed left half-plane", "[markovian]") {
    for (double h : {0.5, 10.0}) {
        const auto eig = dominant_eigenvalues(build_lindblad(build_aah_hamiltonian({9, 1.0, h}), {2.0, 1.0, 0.0}), 0);
        for (const auto& z : eig) CHECK(z.real() <= 1e-10);
    }
    const auto unitary = dominant_eigenvalues(build_lindblad(build_aah_hamiltonian({7, 1.0, 1.0}), {0.0, 1.0, 0.0}), 0);
    for (const auto& z : unitary) CHECK(std::abs(z.real()) < 1e-10);
}

TEST_CASE("short-memory bath: Redfield, Lindblad and HEOM coincide", "[markovian]") {
    const auto H = build_aah_hamiltonian({7, 1.0, 10.0});
    const BathSpec b{2.0, 1e4, 0.0};
    const ComplexMatrix br = build_bloch_redfield(H, b).dense();
    const ComplexMatrix li = build_lindblad(H, b).dense();
    CHECK((br - li).cwiseAbs().maxCoeff() < 1e-3 * b.kappa);

    const auto tol = default_zero_tol(b.kappa);
    const auto heom = cluster_and_gap(dominant_eigenvalues(build_heom_generator(H, b, {2})), 1e-7);
    const auto red = cluster_and_gap(dominant_eigenvalues(build_bloch_redfield(H, b), 0), tol);
    const auto lin = cluster_and_gap(dominant_eigenvalues(build_lindblad(H, b), 0), tol);
    CHECK(compare_spectra(heom, red).hausdorff < 1e-2 * b.kappa);
    CHECK(compare_spectra(heom, lin).hausdorff < 1e-2 * b.kappa);
    CHECK(compare_spectra(red, lin).hausdorff < 1e-2 * b.kappa);
}
