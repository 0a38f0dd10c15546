#pragma once

#include <span>
#include <vector>

#include "tsm/grid.hpp"
#include "tsm/phase_gradient.hpp"

namespace tsm
{
    /// Horizontal-only phase propagation; each bin is integrated independently.
    struct ClassicalState
    {
        std::vector<double> prev_phase;  ///< phi_s(., n-1)
        std::vector<double> prev_dt;     ///< dt(., n-1), used by the trapezoidal rule
    };

    enum class ClassicalRule
    {
        rectangular,
        trapezoidal
    };

    /// phi_s(m, n) = phi_s(m, n-1) + a_s dt(m, n). Updates `state`.
    std::vector<double> propagate_rect(ClassicalState& state, std::span<const double> dt, double synthesis_hop);

    /// phi_s(m, n) = phi_s(m, n-1) + a_s/2 (dt(m, n-1) + dt(m, n)). Uses `state.prev_dt`; updates `state`.
    std::vector<double> propagate_trap(ClassicalState& state, std::span<const double> dt, double synthesis_hop);

    /// Propagate over all frames with phi_s(., 0) = `initial_phase`.
    Grid<double> classical_full(const GradientField& gradients, std::span<const double> initial_phase,
                                double synthesis_hop, ClassicalRule rule);
}  // namespace tsm
