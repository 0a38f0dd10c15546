#include "tsm/pghi.hpp"

#include <algorithm>
#include <numbers>

#include "tsm/errors.hpp"

namespace tsm
{
    namespace
    {
        /// std heap algorithms keep the "largest" element in front.
        bool lower_priority(const HeapEntry& a, const HeapEntry& b) noexcept
        {
            return pops_before(b, a);
        }

        void require_length(std::size_t expected, std::size_t actual, const char* what)
        {
            if (expected != actual)
            {
                throw ParameterError(std::string("pghi: ") + what + " has " + std::to_string(actual) +
                                     " bins, expected " + std::to_string(expected));
            }
        }
    }  // namespace

    bool pops_before(const HeapEntry& a, const HeapEntry& b) noexcept
    {
        if (a.key != b.key)
        {
            return a.key > b.key;
        }
        if (a.frame != b.frame)
        {
            return a.frame == FrameTag::previous;
        }
        return a.bin < b.bin;
    }

    void MagnitudeHeap::push(const HeapEntry& entry)
    {
        m_entries.push_back(entry);
        std::push_heap(m_entries.begin(), m_entries.end(), lower_priority);
    }

    HeapEntry MagnitudeHeap::pop()
    {
        std::pop_heap(m_entries.begin(), m_entries.end(), lower_priority);
        const HeapEntry top = m_entries.back();
        m_entries.pop_back();
        return top;
    }

    const char* to_string(Direction direction) noexcept
    {
        switch (direction)
        {
        case Direction::time:
            return "time";
        case Direction::freq_up:
            return "freq_up";
        case Direction::freq_down:
            return "freq_down";
        }
        return "unknown";
    }

    double random_phase(std::mt19937_64& rng) noexcept
    {
        const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
        return std::numbers::pi - 2.0 * std::numbers::pi * unit;
    }

    PghiState PghiState::initial(std::span<const double> phase, std::span<const double> dt,
                                 std::span<const double> magnitude, double tol, std::uint64_t seed)
    {
        require_length(phase.size(), dt.size(), "initial dt");
        require_length(phase.size(), magnitude.size(), "initial magnitude");
        if (!(tol > 0.0))
        {
            throw ParameterError("pghi: tolerance must be positive");
        }
        PghiState state;
        state.prev_phase.assign(phase.begin(), phase.end());
        state.prev_dt.assign(dt.begin(), dt.end());
        state.prev_mag.assign(magnitude.begin(), magnitude.end());
        state.tol = tol;
        state.rng.seed(seed);
        return state;
    }

    PghiFrameResult pghi_frame(PghiState& state, std::span<const double> magnitude, std::span<const double> dt,
                               std::span<const double> df, double synthesis_hop, double synthesis_freq_step,
                               bool emit_trace)
    {
        const std::size_t bins = magnitude.size();
        require_length(bins, dt.size(), "dt");
        require_length(bins, df.size(), "df");
        require_length(bins, state.prev_phase.size(), "previous phase");
        require_length(bins, state.prev_dt.size(), "previous dt");
        require_length(bins, state.prev_mag.size(), "previous magnitude");
        if (!(synthesis_hop > 0.0) || !(synthesis_freq_step > 0.0))
        {
            throw ParameterError("pghi: synthesis steps must be positive");
        }
        if (!(state.tol > 0.0))
        {
            throw ParameterError("pghi: tolerance must be positive");
        }

        double peak = 0.0;
        for (std::size_t m = 0; m < bins; ++m)
        {
            peak = std::max({ peak, magnitude[m], state.prev_mag[m] });
        }
        const double abstol = state.tol * peak;

        PghiFrameResult result;
        result.phase.assign(bins, 0.0);
        std::vector<bool> pending(bins, false);
        std::size_t remaining = 0;
        for (std::size_t m = 0; m < bins; ++m)
        {
            if (magnitude[m] > abstol)
            {
                pending[m] = true;
                ++remaining;
            }
            else
            {
                result.phase[m] = random_phase(state.rng);
            }
        }
        result.significant_bins = remaining;

        MagnitudeHeap heap;
        heap.reserve(2 * remaining);
        for (std::size_t m = 0; m < bins; ++m)
        {
            if (pending[m])
            {
                heap.push({ state.prev_mag[m], m, FrameTag::previous });
            }
        }

        const double half_hop = synthesis_hop / 2.0;
        const double half_step = synthesis_freq_step / 2.0;
        auto settle = [&](std::size_t target, std::size_t source, FrameTag from, Direction direction) {
            pending[target] = false;
            --remaining;
            heap.push({ magnitude[target], target, FrameTag::current });
            if (emit_trace)
            {
                result.trace.push_back({ source, from, target, direction });
            }
        };

        // Every bin still pending has its previous-frame entry in the heap.
        while (remaining > 0)
        {
            const HeapEntry top = heap.pop();
            const std::size_t m = top.bin;
            if (top.frame == FrameTag::previous)
            {
                if (pending[m])
                {
                    result.phase[m] = state.prev_phase[m] + half_hop * (state.prev_dt[m] + dt[m]);
                    settle(m, m, FrameTag::previous, Direction::time);
                }
                continue;
            }
            if (m + 1 < bins && pending[m + 1])
            {
                result.phase[m + 1] = result.phase[m] + half_step * (df[m] + df[m + 1]);
                settle(m + 1, m, FrameTag::current, Direction::freq_up);
            }
            if (m >= 1 && pending[m - 1])
            {
                result.phase[m - 1] = result.phase[m] - half_step * (df[m] + df[m - 1]);
                settle(m - 1, m, FrameTag::current, Direction::freq_down);
            }
        }

        state.prev_phase = result.phase;
        state.prev_dt.assign(dt.begin(), dt.end());
        state.prev_mag.assign(magnitude.begin(), magnitude.end());
        return result;
    }

    Grid<double> pghi_full(const Grid<double>& magnitude, const GradientField& gradients,
                           std::span<const double> initial_phase, double synthesis_hop, double synthesis_freq_step,
                           const PghiOptions& options, std::vector<PropagationTrace>* traces)
    {
        require_same_shape(magnitude, gradients.dt, "pghi_full");
        require_same_shape(magnitude, gradients.df, "pghi_full");
        require_length(magnitude.bins(), initial_phase.size(), "initial phase");

        Grid<double> phase(magnitude.bins(), magnitude.frames());
        if (traces != nullptr)
        {
            traces->assign(magnitude.frames(), {});
        }
        if (magnitude.frames() == 0)
        {
            return phase;
        }
        std::copy(initial_phase.begin(), initial_phase.end(), phase.frame(0).begin());
        PghiState state =
            PghiState::initial(initial_phase, gradients.dt.frame(0), magnitude.frame(0), options.tol, options.seed);
        for (std::size_t n = 1; n < magnitude.frames(); ++n)
        {
            PghiFrameResult r = pghi_frame(state, magnitude.frame(n), gradients.dt.frame(n), gradients.df.frame(n),
                                           synthesis_hop, synthesis_freq_step, traces != nullptr);
            std::copy(r.phase.begin(), r.phase.end(), phase.frame(n).begin());
            if (traces != nullptr)
            {
                (*traces)[n] = std::move(r.trace);
            }
        }
        return phase;
    }

    PghiStream::PghiStream(Config config) : m_config(config)
    {
        if (!(config.options.tol > 0.0) || !(config.synthesis_hop > 0.0) || !(config.synthesis_freq_step > 0.0) ||
            !(config.analysis_freq_step > 0.0) || config.analysis_hop == 0 || config.fft_size == 0)
        {
            throw ParameterError("PghiStream: invalid configuration");
        }
    }

    std::optional<std::vector<double>> PghiStream::push(std::span<const double> magnitude,
                                                        std::span<const double> phase)
    {
        require_length(magnitude.size(), phase.size(), "pushed phase");
        if (m_has_pending)
        {
            require_length(m_pending_mag.size(), magnitude.size(), "pushed magnitude");
        }
        std::optional<std::vector<double>> out;
        if (m_has_pending)
        {
            out = process(phase);
        }
        m_pending_mag.assign(magnitude.begin(), magnitude.end());
        m_pending_phase.assign(phase.begin(), phase.end());
        m_has_pending = true;
        return out;
    }

    std::optional<std::vector<double>> PghiStream::flush()
    {
        if (!m_has_pending)
        {
            return std::nullopt;
        }
        auto out = process({});
        m_has_pending = false;
        return out;
    }

    std::vector<double> PghiStream::process(std::span<const double> next_phase)
    {
        const std::size_t bins = m_pending_phase.size();
        std::vector<double> dt(bins);
        std::vector<double> df(bins);
        time_derivative(m_prev_analysis_phase, m_pending_phase, next_phase, m_config.analysis_hop,
                        m_config.fft_size, m_config.scheme, dt);
        frequency_derivative(m_pending_phase, m_config.analysis_freq_step, m_config.scheme, df);

        std::vector<double> synthesis;
        if (!m_state)
        {
            m_state = PghiState::initial(m_pending_phase, dt, m_pending_mag, m_config.options.tol,
                                         m_config.options.seed);
            synthesis = m_pending_phase;
        }
        else
        {
            synthesis = pghi_frame(*m_state, m_pending_mag, dt, df, m_config.synthesis_hop,
                                   m_config.synthesis_freq_step)
                            .phase;
        }
        m_prev_analysis_phase = m_pending_phase;
        ++m_frames_out;
        return synthesis;
    }
}  // namespace tsm
