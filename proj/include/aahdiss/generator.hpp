// generator.hpp: sparse superoperator shared by HEOM, Lindblad and Bloch-Redfield dynamics.
//
// Vectorization is column-major: element ρ_ab of block k sits at k·L² + a + L·b,
// matching Eigen's default storage so blocks can be mapped as L×L matrices.

#pragma once

#include "aahdiss/bath.hpp"
#include "aahdiss/core.hpp"

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace aahdiss {

enum class GeneratorKind { heom, lindblad, redfield };

inline std::string to_string(GeneratorKind k) {
    switch (k) {
        case GeneratorKind::heom: return "heom";
        case GeneratorKind::lindblad: return "lindblad";
        case GeneratorKind::redfield: return "redfield";
    }
    return "unknown";
}

// Block-structured description of the HEOM right-hand side, used for matrix-free
// application. Built alongside the assembled matrix; see heom.hpp.
struct HeomLinks {
    struct Up {
        std::size_t target;  // ADO n + e_k
        cplx factor;         // multiplies -i[A, ρ̃_{n+e_k}]
    };
    struct Down {
        std::size_t target;  // ADO n - e_k
        cplx left;           // multiplies A ρ̃_{n-e_k}
        cplx right;          // multiplies ρ̃_{n-e_k} A
    };
    struct Ado {
        cplx damping;  // Σ_k n_k ν_k
        std::vector<Up> up;
        std::vector<Down> down;
    };
    ComplexMatrix hamiltonian;
    int coupling_site{0};  // 1-based
    std::vector<Ado> ados;
};

class Generator {
public:
    Generator(GeneratorKind kind, SparseOperator matrix, int system_dim, std::size_t block_count,
              BathSpec bath, int tier, std::shared_ptr<const HeomLinks> links = nullptr)
        : kind_(kind),
          matrix_(std::move(matrix)),
          system_dim_(system_dim),
          block_count_(block_count),
          bath_(bath),
          tier_(tier),
          links_(std::move(links)) {
        matrix_.makeCompressed();
    }

    GeneratorKind kind() const noexcept { return kind_; }
    const SparseOperator& matrix() const noexcept { return matrix_; }
    int system_dim() const noexcept { return system_dim_; }
    std::size_t block_count() const noexcept { return block_count_; }
    std::size_t block_size() const noexcept {
        return static_cast<std::size_t>(system_dim_) * static_cast<std::size_t>(system_dim_);
    }
    std::size_t dimension() const noexcept { return block_count_ * block_size(); }
    const BathSpec& bath() const noexcept { return bath_; }
    int tier() const noexcept { return tier_; }
    const HeomLinks* heom_links() const noexcept { return links_.get(); }

    // Right-hand side used by the integrator. HEOM generators are applied
    // block-wise without touching the assembled matrix.
    void rhs(const ComplexVector& x, ComplexVector& dx) const {
        if (links_) {
            apply_heom(x, dx);
        } else {
            dx.noalias() = matrix_ * x;
        }
    }

    ComplexMatrix dense() const { return ComplexMatrix(matrix_); }

private:
    void apply_heom(const ComplexVector& x, ComplexVector& dx) const {
        const int L = system_dim_;
        const auto bs = static_cast<Eigen::Index>(block_size());
        const int s = links_->coupling_site - 1;
        const ComplexMatrix& H = links_->hamiltonian;
        dx.resize(x.size());
        for (std::size_t i = 0; i < links_->ados.size(); ++i) {
            const auto& ado = links_->ados[i];
            Eigen::Map<const ComplexMatrix> rho(x.data() + i * bs, L, L);
            Eigen::Map<ComplexMatrix> out(dx.data() + i * bs, L, L);
            out.noalias() = -I * (H * rho);
            out.noalias() += I * (rho * H);
            out -= ado.damping * rho;
            for (const auto& u : ado.up) {
                Eigen::Map<const ComplexMatrix> r(x.data() + u.target * bs, L, L);
                // -i f (A r - r A): A r keeps row s, r A keeps column s.
                out.row(s) += (-I * u.factor) * r.row(s);
                out.col(s) -= (-I * u.factor) * r.col(s);
            }
            for (const auto& d : ado.down) {
                Eigen::Map<const ComplexMatrix> r(x.data() + d.target * bs, L, L);
                out.row(s) += d.left * r.row(s);
                out.col(s) += d.right * r.col(s);
            }
        }
    }

    GeneratorKind kind_;
    SparseOperator matrix_;
    int system_dim_;
    std::size_t block_count_;
    BathSpec bath_;
    int tier_;
    std::shared_ptr<const HeomLinks> links_;
};

namespace detail {

using Triplets = std::vector<Eigen::Triplet<cplx>>;

// Adds scale · vec(X ρ_src Y) into block `dst` for source block `src`.
// Entry ρ_cd contributes X_ac Y_db to (XρY)_ab.
inline void add_sandwich(Triplets& out, const ComplexMatrix& X, const ComplexMatrix& Y, cplx scale,
                         std::size_t dst, std::size_t src) {
    const Eigen::Index L = X.rows();
    const std::size_t bs = static_cast<std::size_t>(L * L);
    std::vector<std::pair<Eigen::Index, Eigen::Index>> xs, ys;
    for (Eigen::Index c = 0; c < L; ++c)
        for (Eigen::Index a = 0; a < L; ++a)
            if (X(a, c) != cplx{0.0}) xs.emplace_back(a, c);
    for (Eigen::Index b = 0; b < L; ++b)
        for (Eigen::Index d = 0; d < L; ++d)
            if (Y(d, b) != cplx{0.0}) ys.emplace_back(d, b);
    for (const auto& [a, c] : xs) {
        for (const auto& [d, b] : ys) {
            const auto row = dst * bs + static_cast<std::size_t>(a + L * b);
            const auto col = src * bs + static_cast<std::size_t>(c + L * d);
            out.emplace_back(static_cast<int>(row), static_cast<int>(col), scale * X(a, c) * Y(d, b));
        }
    }
}

// -i[H, ·] on one block.
inline void add_commutator(Triplets& out, const ComplexMatrix& H, cplx scale, std::size_t dst,
                           std::size_t src) {
    const ComplexMatrix Id = ComplexMatrix::Identity(H.rows(), H.cols());
    add_sandwich(out, H, Id, scale, dst, src);
    add_sandwich(out, Id, H, -scale, dst, src);
}

inline SparseOperator assemble(const Triplets& t, std::size_t dim) {
    SparseOperator m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    m.setFromTriplets(t.begin(), t.end());
    m.prune(cplx{0.0});
    return m;
}

}  // namespace detail

// Column-major vectorization helpers.
inline ComplexVector vectorize(const ComplexMatrix& m) {
    return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

inline ComplexMatrix unvectorize(const ComplexVector& v, int dim, std::size_t block = 0) {
    return Eigen::Map<const ComplexMatrix>(v.data() + block * static_cast<std::size_t>(dim * dim),
                                           dim, dim);
}

}  // namespace aahdiss
