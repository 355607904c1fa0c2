#include "aahdiss/lattice.hpp"

#include <catch_amalgamated.hpp>

#include <sstream>

using namespace aahdiss;
using Catch::Approx;

namespace {

// Sturm-sequence count of eigenvalues below x for a symmetric tridiagonal matrix.
int count_below(const RealVector& d, double off, double x) {
    int n = 0;
    double q = d(0) - x;
    if (q < 0) ++n;
    for (Eigen::Index i = 1; i < d.size(); ++i) {
        q = d(i) - x - off * off / (q == 0.0 ? 1e-300 : q);
        if (q < 0) ++n;
    }
    return n;
}

double bisect_eigenvalue(const RealVector& d, double off, int k) {
    double lo = d.minCoeff() - 2 * std::abs(off) - 1, hi = d.maxCoeff() + 2 * std::abs(off) + 1;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (count_below(d, off, mid) > k ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("clean chain matches the open-boundary band", "[lattice]") {
    const ChainSpec spec{5, 1.0, 0.0};
    const auto H = build_aah_hamiltonian(spec);
    CHECK(H.matrix()(0, 0) == 0.0);
    CHECK(H.matrix()(0, 1) == 1.0);
    const auto eig = diagonalize(H);
    std::vector<double> expected;
    for (int n = 1; n <= 5; ++n) expected.push_back(2.0 * std::cos(n * pi / 6.0));
    std::sort(expected.begin(), expected.end());
    for (int n = 0; n < 5; ++n) CHECK(eig.energies(n) == Approx(expected[n]).margin(1e-12));
}

TEST_CASE("potential follows the quasiperiodic cosine", "[lattice]") {
    const ChainSpec spec{33, 1.0, 10.0};
    const auto H = build_aah_hamiltonian(spec);
    for (int j = 1; j <= 33; ++j)
        CHECK(H.matrix()(j - 1, j - 1) == Approx(10.0 * std::cos(2 * pi * inverse_golden_ratio * j)).margin(1e-12));
    CHECK(spec.center() == 17);
}

TEST_CASE("eigenvalues agree with bisection on the tridiagonal matrix", "[lattice]") {
    for (double h : {0.5, 1.0, 3.0, 10.0}) {
        const ChainSpec spec{15, 1.0, h, 0.3};
        const auto H = build_aah_hamiltonian(spec);
        const auto eig = diagonalize(H);
        const RealVector d = H.matrix().diagonal();
        for (int k = 0; k < 15; ++k) CHECK(eig.energies(k) == Approx(bisect_eigenvalue(d, 1.0, k)).margin(1e-10));
    }
}

TEST_CASE("eigen decomposition is orthonormal, complete and reconstructs H", "[lattice]") {
    const ChainSpec spec{21, 1.0, 4.0, 0.7};
    const auto H = build_aah_hamiltonian(spec);
    const auto eig = diagonalize(H);
    const RealMatrix& V = eig.vectors;
    CHECK((V.transpose() * V - RealMatrix::Identity(21, 21)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((V * eig.energies.asDiagonal() * V.transpose() - H.matrix()).cwiseAbs().maxCoeff() < 1e-8);
    for (int j = 0; j < 21; ++j) CHECK(V.row(j).squaredNorm() == Approx(1.0).margin(1e-10));
    for (int n = 0; n < 21; ++n) {
        const int c = eig.centers[n];
        for (int j = 0; j < 21; ++j) CHECK(V(c - 1, n) * V(c - 1, n) >= V(j, n) * V(j, n));
    }
}

TEST_CASE("invalid chains are rejected", "[lattice]") {
    CHECK_THROWS_AS(build_aah_hamiltonian({4, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(build_aah_hamiltonian({1, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(build_aah_hamiltonian({5, 0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(build_aah_hamiltonian({5, 1.0, -1.0}), std::invalid_argument);
    RealMatrix asym = RealMatrix::Zero(3, 3);
    asym(0, 1) = 1.0;
    CHECK_THROWS_AS(Hamiltonian::from_matrix(asym), std::invalid_argument);
}

TEST_CASE("localization length", "[lattice]") {
    CHECK(localization_length(10.0) == Approx(1.0 / std::log(5.0)));
    CHECK(localization_length(4.0) == Approx(1.0 / std::log(2.0)));
    CHECK_THROWS_AS(localization_length(2.0), aahdiss::domain_error);
    CHECK_THROWS_AS(localization_length(1.0), aahdiss::domain_error);
}

TEST_CASE("IPR of a site", "[lattice]") {
    const auto diag = diagonalize(Hamiltonian::from_matrix(RealVector::LinSpaced(5, 0, 4).asDiagonal().toDenseMatrix()));
    CHECK(ipr_of_site(diag, 3) == Approx(1.0));
    const auto clean = diagonalize(build_aah_hamiltonian({15, 1.0, 0.0}));
    CHECK(ipr_of_site(clean, 8) < 0.2);
    CHECK_THROWS_AS(ipr_of_site(clean, 0), std::out_of_range);
    CHECK_THROWS_AS(ipr_of_site(clean, 16), std::out_of_range);

    // Invariant under the sign of each eigenvector.
    auto flipped = diagonalize(build_aah_hamiltonian({15, 1.0, 10.0}));
    const double before = ipr_of_site(flipped, 8);
    flipped.vectors.col(3) *= -1.0;
    flipped.vectors.col(7) *= -1.0;
    CHECK(ipr_of_site(flipped, 8) == Approx(before).epsilon(1e-14));
}

TEST_CASE("size filter", "[lattice]") {
    std::vector<int> sizes;
    for (int L = 9; L <= 101; L += 2) sizes.push_back(L);
    CHECK(filter_sizes(sizes, 10.0, 0.02) == std::vector<int>{15, 17, 25, 33, 41, 49, 51, 59, 67, 75, 83, 93, 101});
    CHECK(filter_sizes(sizes, 10.0, 0.999999).size() == sizes.size());
    CHECK(filter_sizes(sizes, 10.0, 1e-12).empty());
    CHECK(filter_sizes(std::vector<int>{}, 10.0, 0.02).empty());
    CHECK_THROWS_AS(filter_sizes(sizes, 1.0, 0.02), aahdiss::domain_error);
    CHECK_THROWS_AS(filter_sizes(sizes, 10.0, 0.0), std::invalid_argument);
}

TEST_CASE("spectrum csv", "[lattice]") {
    std::ostringstream os;
    write_spectrum_csv(os, diagonalize(build_aah_hamiltonian({3, 1.0, 0.0})));
    const auto s = os.str();
    CHECK(s.rfind("index,energy,center\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 4);
}
