#include "tsm/classical_pv.hpp"

#include <algorithm>

#include "tsm/errors.hpp"

namespace tsm
{
    namespace
    {
        void check(const ClassicalState& state, std::span<const double> dt, bool needs_prev_dt)
        {
            if (state.prev_phase.size() != dt.size() || (needs_prev_dt && state.prev_dt.size() != dt.size()))
            {
                throw ParameterError("classical PV: array length mismatch");
            }
        }
    }  // namespace

    std::vector<double> propagate_rect(ClassicalState& state, std::span<const double> dt, double synthesis_hop)
    {
        check(state, dt, false);
        std::vector<double> phase(dt.size());
        for (std::size_t m = 0; m < dt.size(); ++m)
        {
            phase[m] = state.prev_phase[m] + synthesis_hop * dt[m];
        }
        state.prev_phase = phase;
        state.prev_dt.assign(dt.begin(), dt.end());
        return phase;
    }

    std::vector<double> propagate_trap(ClassicalState& state, std::span<const double> dt, double synthesis_hop)
    {
        check(state, dt, true);
        const double half_hop = synthesis_hop / 2.0;
        std::vector<double> phase(dt.size());
        for (std::size_t m = 0; m < dt.size(); ++m)
        {
            phase[m] = state.prev_phase[m] + half_hop * (state.prev_dt[m] + dt[m]);
        }
        state.prev_phase = phase;
        state.prev_dt.assign(dt.begin(), dt.end());
        return phase;
    }

    Grid<double> classical_full(const GradientField& gradients, std::span<const double> initial_phase,
                                double synthesis_hop, ClassicalRule rule)
    {
        const Grid<double>& dt = gradients.dt;
        if (initial_phase.size() != dt.bins())
        {
            throw ParameterError("classical PV: initial phase length mismatch");
        }
        Grid<double> phase(dt.bins(), dt.frames());
        if (dt.frames() == 0)
        {
            return phase;
        }
        std::copy(initial_phase.begin(), initial_phase.end(), phase.frame(0).begin());
        ClassicalState state{ { initial_phase.begin(), initial_phase.end() },
                              { dt.frame(0).begin(), dt.frame(0).end() } };
        for (std::size_t n = 1; n < dt.frames(); ++n)
        {
            const auto next = rule == ClassicalRule::trapezoidal ? propagate_trap(state, dt.frame(n), synthesis_hop)
                                                                 : propagate_rect(state, dt.frame(n), synthesis_hop);
            std::copy(next.begin(), next.end(), phase.frame(n).begin());
        }
        return phase;
    }
}  // namespace tsm
