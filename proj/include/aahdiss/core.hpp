// core.hpp: shared numeric aliases and the error hierarchy used across aahdiss.

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace aahdiss {

using cplx = std::complex<double>;

using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;
using DensityMatrix = Eigen::MatrixXcd;
using SparseOperator = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

// ------------------------------------------------------------------ errors

// Parameter outside the regime where a formula is defined (e.g. h <= 2J for ξ).
struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

// Requested object would exceed the configured memory budget.
class resource_error : public std::runtime_error {
public:
    resource_error(const std::string& what, std::size_t dimension)
        : std::runtime_error(what + " (dimension " + std::to_string(dimension) + ")"),
          dimension_(dimension) {}

    std::size_t dimension() const noexcept { return dimension_; }

private:
    std::size_t dimension_;
};

// ODE integration failed; carries the time the integrator reached.
class integration_error : public std::runtime_error {
public:
    integration_error(const std::string& what, double time_reached)
        : std::runtime_error(what + " at t=" + std::to_string(time_reached)),
          time_reached_(time_reached) {}

    double time_reached() const noexcept { return time_reached_; }

private:
    double time_reached_;
};

// Step size underflow: the problem is too stiff for the explicit scheme.
struct stiffness_error : integration_error {
    using integration_error::integration_error;
};

// Numerical backend (eigensolver) failed or produced unreliable output.
struct diagnostics_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configuration rejected; lists every offending field.
class validation_error : public std::invalid_argument {
public:
    explicit validation_error(std::vector<std::string> problems)
        : std::invalid_argument(join(problems)), problems_(std::move(problems)) {}

    const std::vector<std::string>& problems() const noexcept { return problems_; }

private:
    static std::string join(const std::vector<std::string>& p) {
        std::string out = "invalid configuration:";
        for (const auto& s : p) out += "\n  " + s;
        return out;
    }
    std::vector<std::string> problems_;
};

// ----------------------------------------------------------- small helpers

inline double max_abs(const ComplexMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline ComplexMatrix hermitian_part(const ComplexMatrix& m) {
    return 0.5 * (m + m.adjoint());
}

// Projector |site><site| with 1-based site index.
inline ComplexMatrix site_projector(int dim, int site) {
    ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
    p(site - 1, site - 1) = 1.0;
    return p;
}

}  // namespace aahdiss
