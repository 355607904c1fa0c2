// spectrum.hpp: dominant generator eigenvalues, two-cluster analysis and spectral comparison.

#pragma once

#include "aahdiss/core.hpp"
#include "aahdiss/generator.hpp"
#include "aahdiss/lattice.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace aahdiss {

struct SpectrumOptions {
    std::size_t dense_limit{8000};
};

// All eigenvalues of a dense complex matrix (LAPACK zgeev, no eigenvectors).
inline std::vector<cplx> eigenvalues_dense(ComplexMatrix m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("eigenvalues_dense: matrix must be square");
    const auto n = static_cast<lapack_int>(m.rows());
    std::vector<cplx> w(static_cast<std::size_t>(n));
    if (n == 0) return w;
    const lapack_int info =
        LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, reinterpret_cast<lapack_complex_double*>(m.data()),
                      n, reinterpret_cast<lapack_complex_double*>(w.data()), nullptr, 1, nullptr, 1);
    if (info != 0)
        throw diagnostics_error("eigenvalues_dense: zgeev failed (info=" + std::to_string(info) +
                                "); QR iteration did not converge for " +
                                std::to_string(info > 0 ? n - info : 0) + " eigenvalues");
    return w;
}

// Descending real part; ties broken by ascending imaginary part.
inline void sort_by_decay(std::vector<cplx>& v) {
    std::sort(v.begin(), v.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) return a.real() > b.real();
        return a.imag() < b.imag();
    });
}

// The k eigenvalues with the largest real parts (all of them when k = 0 or k >= dim).
inline std::vector<cplx> dominant_eigenvalues(const Generator& g, std::size_t k,
                                              const SpectrumOptions& opt = {}) {
    const std::size_t dim = g.dimension();
    if (k > dim) throw std::invalid_argument("dominant_eigenvalues: k exceeds generator dimension");
    if (dim > opt.dense_limit)
        throw resource_error("dominant_eigenvalues: dense eigensolve above configured limit", dim);
    auto w = eigenvalues_dense(g.dense());
    sort_by_decay(w);
    if (k != 0) w.resize(k);
    return w;
}

// HEOM default: L² eigenvalues.
inline std::vector<cplx> dominant_eigenvalues(const Generator& g, const SpectrumOptions& opt = {}) {
    return dominant_eigenvalues(g, g.block_size(), opt);
}

enum class ClusterLabel { steady, slow, fast, rest };

inline const char* to_string(ClusterLabel c) {
    switch (c) {
        case ClusterLabel::steady: return "steady";
        case ClusterLabel::slow: return "slow";
        case ClusterLabel::fast: return "fast";
        case ClusterLabel::rest: return "rest";
    }
    return "rest";
}

struct SpectrumReport {
    std::vector<cplx> eigenvalues;  // descending Re λ
    std::vector<ClusterLabel> labels;
    std::optional<double> delta;
    std::optional<double> tau_fast;
    std::optional<double> tau_slow;          // 1 / max |Re λ| over slow (slow-cluster edge)
    std::optional<double> tau_slow_longest;  // 1 / min |Re λ| over slow (infinite below zero_tol)
    double zero_tol{0.0};
    std::size_t requested{0};

    bool clustered() const noexcept { return delta.has_value(); }

    std::vector<cplx> cluster(ClusterLabel c) const {
        std::vector<cplx> out;
        for (std::size_t i = 0; i < eigenvalues.size(); ++i)
            if (labels[i] == c) out.push_back(eigenvalues[i]);
        return out;
    }
};

// Default zero tolerance, scale-aware in κ.
inline double default_zero_tol(double kappa) { return 1e-9 * std::max(kappa, 1e-300); }

// Removes the steady state (the eigenvalue with the largest real part, which must satisfy
// |Re λ| < zero_tol), then splits the rest at the largest gap in sorted |Re λ|.
//   Δ      = min |Re λ| over fast  -  max |Re λ| over slow
//   τ_slow = 1 / max |Re λ| over slow; the onset of slow-cluster dominance
//   τ_slow_longest = max |Re λ|^{-1} over slow (infinite if the slow cluster touches zero)
//   τ_fast = min |Re λ|^{-1} over fast
inline SpectrumReport cluster_and_gap(std::vector<cplx> eigs, double zero_tol) {
    if (!(zero_tol > 0.0)) throw std::invalid_argument("cluster_and_gap: zero_tol must be positive");
    SpectrumReport rep;
    rep.zero_tol = zero_tol;
    rep.requested = eigs.size();
    sort_by_decay(eigs);
    rep.eigenvalues = eigs;
    rep.labels.assign(eigs.size(), ClusterLabel::rest);
    if (eigs.empty() || std::abs(eigs.front().real()) >= zero_tol)
        throw std::invalid_argument("cluster_and_gap: no steady-state eigenvalue within zero_tol");
    rep.labels[0] = ClusterLabel::steady;

    std::vector<std::size_t> order;
    for (std::size_t i = 1; i < eigs.size(); ++i) order.push_back(i);
    if (order.size() < 2) return rep;
    auto decay = [&](std::size_t i) { return std::abs(eigs[i].real()); };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return decay(a) < decay(b); });

    std::size_t split = 0;
    double widest = -1.0;
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
        const double g = decay(order[i + 1]) - decay(order[i]);
        if (g > widest) {
            widest = g;
            split = i;
        }
    }
    for (std::size_t i = 0; i < order.size(); ++i)
        rep.labels[order[i]] = i <= split ? ClusterLabel::slow : ClusterLabel::fast;

    const double slow_min = decay(order.front());
    const double slow_max = decay(order[split]);
    const double fast_min = decay(order[split + 1]);
    const double fast_max = decay(order.back());
    rep.delta = fast_min - slow_max;
    rep.tau_slow = 1.0 / slow_max;
    rep.tau_slow_longest =
        slow_min < zero_tol ? std::numeric_limits<double>::infinity() : 1.0 / slow_min;
    rep.tau_fast = 1.0 / fast_max;
    return rep;
}

// Symmetric Hausdorff distance between two point sets in the complex plane.
inline double hausdorff_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("hausdorff_distance: empty set");
    auto directed = [](const std::vector<cplx>& x, const std::vector<cplx>& y) {
        double worst = 0.0;
        for (const auto& p : x) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : y) best = std::min(best, std::abs(p - q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

struct SpectrumComparison {
    double hausdorff{0.0};
    std::optional<double> delta_difference;
    std::optional<double> tau_fast_difference;
    std::optional<double> tau_slow_difference;
};

inline SpectrumComparison compare_spectra(const SpectrumReport& a, const SpectrumReport& b) {
    if (a.requested != b.requested || a.eigenvalues.size() != b.eigenvalues.size())
        throw std::invalid_argument("compare_spectra: reports hold different eigenvalue counts");
    SpectrumComparison c;
    c.hausdorff = hausdorff_distance(a.eigenvalues, b.eigenvalues);
    if (a.delta && b.delta) c.delta_difference = std::abs(*a.delta - *b.delta);
    if (a.tau_fast && b.tau_fast) c.tau_fast_difference = std::abs(*a.tau_fast - *b.tau_fast);
    if (a.tau_slow && b.tau_slow && std::isfinite(*a.tau_slow) && std::isfinite(*b.tau_slow))
        c.tau_slow_difference = std::abs(*a.tau_slow - *b.tau_slow);
    return c;
}

// True iff every clustered eigenvalue has Im λ within tol of a Bohr frequency ε_m - ε_n.
inline bool bohr_frequency_check(const SpectrumReport& report, const EigenDecomposition& eig, double tol) {
    std::vector<double> bohr;
    bohr.reserve(static_cast<std::size_t>(eig.dim() * eig.dim()));
    for (int m = 0; m < eig.dim(); ++m)
        for (int n = 0; n < eig.dim(); ++n) bohr.push_back(eig.energies(m) - eig.energies(n));
    std::sort(bohr.begin(), bohr.end());
    for (std::size_t i = 0; i < report.eigenvalues.size(); ++i) {
        if (report.labels[i] != ClusterLabel::slow && report.labels[i] != ClusterLabel::fast) continue;
        const double w = report.eigenvalues[i].imag();
        auto it = std::lower_bound(bohr.begin(), bohr.end(), w);
        double best = std::numeric_limits<double>::infinity();
        if (it != bohr.end()) best = std::min(best, std::abs(*it - w));
        if (it != bohr.begin()) best = std::min(best, std::abs(*std::prev(it) - w));
        if (best > tol) return false;
    }
    return true;
}

inline void write_spectrum_csv(std::ostream& os, const SpectrumReport& r) {
    os << "re,im,cluster_label\n";
    os.precision(17);
    for (std::size_t i = 0; i < r.eigenvalues.size(); ++i)
        os << r.eigenvalues[i].real() << ',' << r.eigenvalues[i].imag() << ',' << to_string(r.labels[i])
           << '\n';
}

}  // namespace aahdiss
