#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "tsm/grid.hpp"
#include "tsm/phase_gradient.hpp"

namespace tsm
{
    enum class FrameTag : std::uint8_t
    {
        previous,
        current
    };

    /// (magnitude key, bin, frame) tuple held in the integration heap.
    struct HeapEntry
    {
        double key = 0.0;
        std::size_t bin = 0;
        FrameTag frame = FrameTag::previous;
    };

    /// True if `a` leaves the heap before `b`: larger key first; on equal keys
    /// previous-frame entries first, then the lower bin.
    bool pops_before(const HeapEntry& a, const HeapEntry& b) noexcept;

    /// Binary max-heap ordered by pops_before.
    class MagnitudeHeap
    {
    public:
        void reserve(std::size_t n) { m_entries.reserve(n); }
        void clear() noexcept { m_entries.clear(); }
        bool empty() const noexcept { return m_entries.empty(); }
        std::size_t size() const noexcept { return m_entries.size(); }

        void push(const HeapEntry& entry);
        const HeapEntry& top() const { return m_entries.front(); }
        HeapEntry pop();

        /// Unordered view of the remaining entries.
        std::span<const HeapEntry> entries() const noexcept { return m_entries; }

    private:
        std::vector<HeapEntry> m_entries;
    };

    enum class Direction : std::uint8_t
    {
        time,       ///< (m, n-1) -> (m, n)
        freq_up,    ///< (m, n) -> (m+1, n)
        freq_down   ///< (m, n) -> (m-1, n)
    };

    const char* to_string(Direction direction) noexcept;

    struct PropagationStep
    {
        std::size_t source_bin = 0;
        FrameTag source_frame = FrameTag::previous;
        std::size_t target_bin = 0;
        Direction direction = Direction::time;

        friend bool operator==(const PropagationStep&, const PropagationStep&) = default;
    };

    /// Ordered phase assignments made while integrating one frame.
    using PropagationTrace = std::vector<PropagationStep>;

    /// Everything carried from frame n-1 to frame n.
    struct PghiState
    {
        std::vector<double> prev_phase;  ///< synthesis phase phi_s(., n-1)
        std::vector<double> prev_dt;     ///< time derivative at n-1, rad/sample
        std::vector<double> prev_mag;    ///< s(., n-1)
        double tol = 1e-6;
        std::mt19937_64 rng{ 0 };

        /// State after frame 0, whose synthesis phase is its analysis phase.
        static PghiState initial(std::span<const double> phase, std::span<const double> dt,
                                 std::span<const double> magnitude, double tol, std::uint64_t seed);
    };

    /// Uniform draw on (-pi, pi] from the top 53 bits of one generator output.
    double random_phase(std::mt19937_64& rng) noexcept;

    struct PghiFrameResult
    {
        std::vector<double> phase;         ///< phi_s(., n)
        std::size_t significant_bins = 0;  ///< |I|
        PropagationTrace trace;            ///< filled only when requested
    };

    /// Integrate the synthesis phase of one frame from the previous frame's state.
    ///
    /// Bins with magnitude at most tol * max(s(., n) U s(., n-1)) get random phase.
    /// The rest are reached through the heap: time steps use the trapezoid
    /// phi_s(m, n-1) + a_s/2 (dt(m, n-1) + dt(m, n)), frequency steps
    /// phi_s(m, n) +/- b_s/2 (df(m, n) + df(m+/-1, n)). Each bin is assigned once.
    /// On return `state` describes frame n.
    PghiFrameResult pghi_frame(PghiState& state, std::span<const double> magnitude, std::span<const double> dt,
                               std::span<const double> df, double synthesis_hop, double synthesis_freq_step,
                               bool emit_trace = false);

    struct PghiOptions
    {
        double tol = 1e-6;
        std::uint64_t seed = 0;
    };

    /// Fold pghi_frame over frames 1..N-1 with phi_s(., 0) = `initial_phase`.
    /// When `traces` is given it receives one trace per frame (frame 0's is empty).
    Grid<double> pghi_full(const Grid<double>& magnitude, const GradientField& gradients,
                           std::span<const double> initial_phase, double synthesis_hop, double synthesis_freq_step,
                           const PghiOptions& options, std::vector<PropagationTrace>* traces = nullptr);

    /// Frame-at-a-time driver with the one-frame lookahead the centred time
    /// difference needs: the synthesis phase of frame n is released when frame
    /// n+1 is pushed (or on flush() for the last frame). Produces the same
    /// phases as gradient_field + pghi_full.
    class PghiStream
    {
    public:
        struct Config
        {
            std::size_t fft_size = 8192;
            std::size_t analysis_hop = 512;
            double analysis_freq_step = 1.0;  ///< b_a
            double synthesis_hop = 1024.0;    ///< a_s
            double synthesis_freq_step = 2.0; ///< b_s
            PghiOptions options;
            DiffScheme scheme = DiffScheme::centered;
        };

        explicit PghiStream(Config config);

        /// Feed magnitude and analysis phase of the next frame.
        std::optional<std::vector<double>> push(std::span<const double> magnitude, std::span<const double> phase);
        /// Release the final pending frame, if any.
        std::optional<std::vector<double>> flush();

        std::size_t frames_out() const noexcept { return m_frames_out; }

    private:
        std::vector<double> process(std::span<const double> next_phase);

        Config m_config;
        std::optional<PghiState> m_state;
        std::vector<double> m_prev_analysis_phase;
        std::vector<double> m_pending_mag;
        std::vector<double> m_pending_phase;
        bool m_has_pending = false;
        std::size_t m_frames_out = 0;
    };
}  // namespace tsm
