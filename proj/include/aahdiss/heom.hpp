// heom.hpp: hierarchical equations of motion for a single particle coupled at one site.
//
// With C(t) = Σ_k c_k e^{-ν_k t} and coupling A = |j0><j0|, each auxiliary density
// operator (ADO) labelled by n ∈ ℕ^K, |n| <= tier, obeys
//
//   dρ_n/dt = (-i[H,·] - Σ_k n_k ν_k) ρ_n - i Σ_k [A, ρ_{n+e_k}]
//             - i Σ_k n_k (c_k A ρ_{n-e_k} - c̃_k ρ_{n-e_k} A),
//
// where c̃_k is the coefficient of e^{-ν_k t} in C(t)*. Since C(t) is real here, c̃_k = c_k.
// ADOs are stored scaled, ρ̃_n = ρ_n / Π_k sqrt(n_k! |c_k|^{n_k}); ADOs beyond the tier are zero.

#pragma once

#include "aahdiss/bath.hpp"
#include "aahdiss/core.hpp"
#include "aahdiss/generator.hpp"
#include "aahdiss/integrator.hpp"
#include "aahdiss/lattice.hpp"
#include "aahdiss/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace aahdiss {

struct TierSpec {
    int tier{0};
};

struct HeomOptions {
    std::size_t memory_budget_bytes{std::size_t{3} << 30};
};

// Multi-indices n ∈ ℕ^K with |n| <= tier, ordered by level then lexicographically.
class HierarchyIndex {
public:
    HierarchyIndex(int modes, int tier) : modes_(modes), tier_(tier) {
        if (modes < 0 || tier < 0) throw std::invalid_argument("HierarchyIndex: negative size");
        std::vector<int> cur(static_cast<std::size_t>(modes), 0);
        for (int level = 0; level <= tier; ++level) enumerate(cur, 0, level);
        for (std::size_t i = 0; i < labels_.size(); ++i) lookup_.emplace(labels_[i], i);
    }

    // Number of multi-indices: C(tier + K, K).
    static std::size_t count(int modes, int tier) {
        double c = 1.0;
        for (int k = 1; k <= modes; ++k) c = c * (tier + k) / k;
        return static_cast<std::size_t>(std::llround(c));
    }

    std::size_t size() const noexcept { return labels_.size(); }
    int modes() const noexcept { return modes_; }
    int tier() const noexcept { return tier_; }
    const std::vector<int>& operator[](std::size_t i) const { return labels_.at(i); }

    std::optional<std::size_t> find(const std::vector<int>& n) const {
        auto it = lookup_.find(n);
        if (it == lookup_.end()) return std::nullopt;
        return it->second;
    }

private:
    void enumerate(std::vector<int>& cur, int k, int remaining) {
        if (k == modes_) {
            if (remaining == 0) labels_.push_back(cur);
            return;
        }
        for (int v = remaining; v >= 0; --v) {
            cur[static_cast<std::size_t>(k)] = v;
            enumerate(cur, k + 1, remaining - v);
        }
        cur[static_cast<std::size_t>(k)] = 0;
    }

    int modes_;
    int tier_;
    std::vector<std::vector<int>> labels_;
    std::map<std::vector<int>, std::size_t> lookup_;
};

inline std::size_t heom_dimension(int L, int modes, int tier) {
    return HierarchyIndex::count(modes, tier) * static_cast<std::size_t>(L) * static_cast<std::size_t>(L);
}

// Rough footprint of assembly plus integration work vectors.
inline std::size_t heom_memory_estimate(int L, int modes, int tier, double h_row_nnz = 3.0) {
    const double dim = static_cast<double>(heom_dimension(L, modes, tier));
    const double nnz_per_row = 2.0 * h_row_nnz + 4.0 * modes + 1.0;
    const double matrix = dim * nnz_per_row * (sizeof(cplx) + sizeof(int)) * 2.5;  // triplets + CSR
    const double vectors = dim * sizeof(cplx) * 12.0;
    return static_cast<std::size_t>(matrix + vectors);
}

inline Generator build_heom_generator(const Hamiltonian& H, const BathSpec& b, TierSpec tier,
                                      const HeomOptions& opt = {}) {
    if (tier.tier < 0) throw std::invalid_argument("build_heom_generator: tier must be >= 0");
    const auto modes = decompose(b);
    const int K = static_cast<int>(modes.size());
    const int L = H.dim();
    const int site = H.center();

    const double h_nnz = static_cast<double>((H.matrix().array() != 0.0).count()) / L;
    const std::size_t dim = heom_dimension(L, K, tier.tier);
    if (heom_memory_estimate(L, K, tier.tier, h_nnz) > opt.memory_budget_bytes)
        throw resource_error("build_heom_generator: hierarchy exceeds memory budget", dim);

    const HierarchyIndex index(K, tier.tier);
    const ComplexMatrix Hc = H.complex_matrix();
    const ComplexMatrix A = site_projector(L, site);
    const ComplexMatrix Id = ComplexMatrix::Identity(L, L);

    auto links = std::make_shared<HeomLinks>();
    links->hamiltonian = Hc;
    links->coupling_site = site;
    links->ados.resize(index.size());

    detail::Triplets trips;
    trips.reserve(dim * static_cast<std::size_t>(2 * h_nnz + 4 * K + 1));

    for (std::size_t i = 0; i < index.size(); ++i) {
        const auto& n = index[i];
        auto& ado = links->ados[i];

        cplx damping = 0.0;
        for (int k = 0; k < K; ++k) damping += static_cast<double>(n[k]) * modes[k].rate;
        ado.damping = damping;

        detail::add_commutator(trips, Hc, -I, i, i);
        if (damping != cplx{0.0}) detail::add_sandwich(trips, Id, Id, -damping, i, i);

        for (int k = 0; k < K; ++k) {
            const double mag = std::abs(modes[k].coefficient);
            if (mag == 0.0) continue;  // decoupled hierarchy

            auto up = n;
            ++up[k];
            if (auto j = index.find(up)) {
                const cplx f = std::sqrt((n[k] + 1) * mag);
                ado.up.push_back({*j, f});
                detail::add_sandwich(trips, A, Id, -I * f, i, *j);
                detail::add_sandwich(trips, Id, A, I * f, i, *j);
            }
            if (n[k] > 0) {
                auto down = n;
                --down[k];
                const auto j = index.find(down).value();
                const double f = std::sqrt(n[k] / mag);
                const cplx c = modes[k].coefficient;
                const cplx c_tilde = c;  // real correlation function
                const cplx left = -I * f * c;
                const cplx right = I * f * c_tilde;
                ado.down.push_back({j, left, right});
                detail::add_sandwich(trips, A, Id, left, i, j);
                detail::add_sandwich(trips, Id, A, right, i, j);
            }
        }
    }

    return Generator(GeneratorKind::heom, detail::assemble(trips, dim), L, index.size(), b,
                     tier.tier, std::move(links));
}

// Flattened ADO vector; block 0 is the physical reduced state.
class HierarchyState {
public:
    HierarchyState(const Generator& g, const DensityMatrix& rho0)
        : dim_(g.system_dim()), data_(ComplexVector::Zero(static_cast<Eigen::Index>(g.dimension()))) {
        if (rho0.rows() != dim_ || rho0.cols() != dim_)
            throw std::invalid_argument("HierarchyState: rho0 dimension mismatch");
        data_.head(rho0.size()) = vectorize(rho0);
    }

    HierarchyState(int dim, ComplexVector data) : dim_(dim), data_(std::move(data)) {}

    int dim() const noexcept { return dim_; }
    const ComplexVector& data() const noexcept { return data_; }
    ComplexVector& data() noexcept { return data_; }
    ComplexMatrix ado(std::size_t i) const { return unvectorize(data_, dim_, i); }

private:
    int dim_;
    ComplexVector data_;
};

inline DensityMatrix reduced_state(const HierarchyState& s) { return hermitian_part(s.ado(0)); }

namespace detail {

inline void require_density_matrix(const DensityMatrix& rho, double tol = 1e-10) {
    if (rho.rows() != rho.cols()) throw std::invalid_argument("density matrix must be square");
    if (max_abs(rho - rho.adjoint()) > tol)
        throw std::invalid_argument("density matrix must be Hermitian");
    if (std::abs(rho.trace() - cplx{1.0}) > tol)
        throw std::invalid_argument("density matrix must have unit trace");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol)
        throw std::invalid_argument("density matrix must be positive semidefinite");
}

}  // namespace detail

// Evolves any generator from ρ(0) (auxiliary blocks zero) and records ρ_0 at `times`.
inline Trajectory evolve(const Generator& g, const DensityMatrix& rho0, std::span<const double> times,
                         const IntegratorOptions& opt = {}) {
    detail::require_density_matrix(rho0);
    if (rho0.rows() != g.system_dim()) throw std::invalid_argument("evolve: rho0 dimension mismatch");
    check_times(std::vector<double>(times.begin(), times.end()));

    HierarchyState state(g, rho0);
    Trajectory traj;
    traj.method = to_string(g.kind());
    traj.parameters = {{"kappa", g.bath().kappa}, {"gamma", g.bath().gamma},
                       {"omega0", g.bath().omega0}, {"tier", static_cast<double>(g.tier())}};
    traj.times.reserve(times.size());
    traj.states.reserve(times.size());
    traj.diagnostics.min_eigenvalue = 1.0;

    const int L = g.system_dim();
    auto rhs = [&g](double, const ComplexVector& x, ComplexVector& dx) { g.rhs(x, dx); };
    auto observe = [&](std::size_t idx, double t, const ComplexVector& y) {
        const ComplexMatrix raw = idx == 0 ? rho0 : unvectorize(y, L, 0);
        auto& d = traj.diagnostics;
        d.max_hermiticity_defect = std::max(d.max_hermiticity_defect, max_abs(raw - raw.adjoint()));
        d.max_trace_defect = std::max(d.max_trace_defect, std::abs(raw.trace() - cplx{1.0}));
        DensityMatrix rho = idx == 0 ? rho0 : hermitian_part(raw);
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rho, Eigen::EigenvaluesOnly);
        d.min_eigenvalue = std::min(d.min_eigenvalue, es.eigenvalues().minCoeff());
        traj.times.push_back(t);
        traj.states.push_back(std::move(rho));
    };
    const auto stats = integrate(rhs, state.data(), times, opt, observe);
    traj.diagnostics.steps = stats.accepted;
    return traj;
}

inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(a - b), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

struct TierConvergenceReport {
    std::vector<int> tiers;
    std::vector<double> distances;  // distances[i]: max_t D(tier_i, tier_{i+1})
    double threshold{1e-4};
    bool converged{false};
};

inline TierConvergenceReport tier_convergence(const Hamiltonian& H, const BathSpec& b,
                                              const DensityMatrix& rho0,
                                              std::span<const double> times, std::vector<int> tiers,
                                              double threshold = 1e-4,
                                              const IntegratorOptions& opt = {}) {
    if (tiers.size() < 2) throw std::invalid_argument("tier_convergence: need at least two tiers");
    TierConvergenceReport rep;
    rep.tiers = tiers;
    rep.threshold = threshold;
    std::vector<Trajectory> runs;
    runs.reserve(tiers.size());
    for (int t : tiers) runs.push_back(evolve(build_heom_generator(H, b, {t}), rho0, times, opt));
    for (std::size_t i = 0; i + 1 < runs.size(); ++i) {
        double worst = 0.0;
        for (std::size_t k = 0; k < runs[i].size(); ++k)
            worst = std::max(worst, trace_distance(runs[i].states[k], runs[i + 1].states[k]));
        rep.distances.push_back(worst);
    }
    rep.converged = rep.distances.back() < threshold;
    return rep;
}

}  // namespace aahdiss
