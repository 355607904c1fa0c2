// lattice.hpp: Aubry-André-Harper chain: Hamiltonian, eigensystem, localization diagnostics.
//
// Sites are 1-based at every interface: V_j = h cos(2πβj + φ), j = 1..L, and the
// central site is j0 = (L+1)/2. Storage inside Eigen objects is 0-based.

#pragma once

#include "aahdiss/core.hpp"

#include <cmath>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace aahdiss {

inline const double inverse_golden_ratio = (std::sqrt(5.0) - 1.0) / 2.0;

struct ChainSpec {
    int L{0};
    double J{1.0};
    double h{0.0};
    double phi{0.0};
    double beta{inverse_golden_ratio};

    int center() const noexcept { return (L + 1) / 2; }

    double potential(int site) const { return h * std::cos(2.0 * pi * beta * site + phi); }

    void validate() const {
        if (L < 3) throw std::invalid_argument("ChainSpec: L must be >= 3, got " + std::to_string(L));
        if (L % 2 == 0) throw std::invalid_argument("ChainSpec: L must be odd, got " + std::to_string(L));
        if (!(J > 0.0)) throw std::invalid_argument("ChainSpec: J must be positive");
        if (!(h >= 0.0)) throw std::invalid_argument("ChainSpec: h must be non-negative");
    }
};

// Real symmetric single-particle Hamiltonian.
class Hamiltonian {
public:
    Hamiltonian() = default;

    // Arbitrary real symmetric matrix; used for surrogates and tests.
    static Hamiltonian from_matrix(RealMatrix m) {
        if (m.rows() != m.cols() || m.rows() == 0)
            throw std::invalid_argument("Hamiltonian: matrix must be square and non-empty");
        if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + m.cwiseAbs().maxCoeff()))
            throw std::invalid_argument("Hamiltonian: matrix must be symmetric");
        Hamiltonian H;
        H.matrix_ = std::move(m);
        return H;
    }

    int dim() const noexcept { return static_cast<int>(matrix_.rows()); }
    const RealMatrix& matrix() const noexcept { return matrix_; }
    ComplexMatrix complex_matrix() const { return matrix_.cast<cplx>(); }

    // Coupling site of the bath; the chain center for AAH-built Hamiltonians.
    int center() const noexcept { return (dim() + 1) / 2; }

private:
    friend Hamiltonian build_aah_hamiltonian(const ChainSpec&);
    RealMatrix matrix_;
};

inline Hamiltonian build_aah_hamiltonian(const ChainSpec& spec) {
    spec.validate();
    const int L = spec.L;
    RealMatrix m = RealMatrix::Zero(L, L);
    for (int j = 1; j <= L; ++j) m(j - 1, j - 1) = spec.potential(j);
    for (int j = 1; j < L; ++j) {
        m(j - 1, j) = spec.J;
        m(j, j - 1) = spec.J;
    }
    Hamiltonian H;
    H.matrix_ = std::move(m);
    return H;
}

struct EigenDecomposition {
    RealVector energies;     // ascending
    RealMatrix vectors;      // column n is φ_n(j)
    std::vector<int> centers;  // j_n = argmax_j |φ_n(j)|², 1-based, ties -> smallest j

    int dim() const noexcept { return static_cast<int>(energies.size()); }
};

inline EigenDecomposition diagonalize(const Hamiltonian& H) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(H.matrix());
    if (solver.info() != Eigen::Success)
        throw diagnostics_error("diagonalize: symmetric eigensolver failed");

    EigenDecomposition eig;
    eig.energies = solver.eigenvalues();
    eig.vectors = solver.eigenvectors();
    const int L = H.dim();
    eig.centers.resize(L);
    for (int n = 0; n < L; ++n) {
        int best = 0;
        double best_w = -1.0;
        for (int j = 0; j < L; ++j) {
            const double w = eig.vectors(j, n) * eig.vectors(j, n);
            if (w > best_w) {
                best_w = w;
                best = j;
            }
        }
        eig.centers[n] = best + 1;
    }
    return eig;
}

// ξ = 1/ln(h/2J); only defined in the localized phase.
inline double localization_length(double h, double J = 1.0) {
    if (!(J > 0.0)) throw std::invalid_argument("localization_length: J must be positive");
    if (!(h > 2.0 * J))
        throw domain_error("localization_length: requires h > 2J (localized phase)");
    return 1.0 / std::log(h / (2.0 * J));
}

// IPR(j0) = Σ_m |<m|j0>|⁴
inline double ipr_of_site(const EigenDecomposition& eig, int site) {
    if (site < 1 || site > eig.dim())
        throw std::out_of_range("ipr_of_site: site " + std::to_string(site) + " outside 1.." +
                                std::to_string(eig.dim()));
    return eig.vectors.row(site - 1).array().square().square().sum();
}

// Keeps odd sizes whose central site overlaps a single eigenstate: IPR(j0) > 1 - epsilon.
inline std::vector<int> filter_sizes(std::span<const int> sizes, double h, double epsilon,
                                     double J = 1.0, double phi = 0.0,
                                     double beta = inverse_golden_ratio) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("filter_sizes: epsilon must lie in (0,1)");
    if (!(h > 2.0 * J)) throw domain_error("filter_sizes: requires h > 2J");
    std::vector<int> kept;
    for (int L : sizes) {
        const ChainSpec spec{L, J, h, phi, beta};
        const auto eig = diagonalize(build_aah_hamiltonian(spec));
        if (ipr_of_site(eig, spec.center()) > 1.0 - epsilon) kept.push_back(L);
    }
    return kept;
}

inline void write_spectrum_csv(std::ostream& os, const EigenDecomposition& eig) {
    os << "index,energy,center\n";
    os.precision(17);
    for (int n = 0; n < eig.dim(); ++n)
        os << n + 1 << ',' << eig.energies(n) << ',' << eig.centers[n] << '\n';
}

}  // namespace aahdiss
