// trajectory.hpp: time series of reduced density matrices with provenance.

#pragma once

#include "aahdiss/core.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace aahdiss {

struct TrajectoryDiagnostics {
    double max_trace_defect{0.0};        // max_t |tr ρ(t) - 1|
    double max_hermiticity_defect{0.0};  // max_t ‖ρ - ρ†‖_max before re-Hermitization
    double min_eigenvalue{0.0};          // min_t λ_min(ρ(t))
    std::size_t steps{0};
};

struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix> states;
    std::string method;
    std::map<std::string, double> parameters;
    TrajectoryDiagnostics diagnostics;

    std::size_t size() const noexcept { return times.size(); }
    int dim() const { return states.empty() ? 0 : static_cast<int>(states.front().rows()); }

    RealVector populations(std::size_t i) const { return states.at(i).diagonal().real(); }
};

inline void check_times(const std::vector<double>& times) {
    if (times.empty()) throw std::invalid_argument("time grid is empty");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (!(times[i] > times[i - 1]))
            throw std::invalid_argument("time grid must be strictly ascending");
}

}  // namespace aahdiss
