#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "tsm/grid.hpp"
#include "tsm/signal.hpp"

namespace tsm
{
    /// Analysis/synthesis setup shared by the STFT and its overlap-add inverse.
    struct AnalysisConfig
    {
        std::vector<double> window;      ///< analysis window g_a, centred (see window.hpp)
        std::size_t fft_size = 8192;     ///< M
        std::size_t analysis_hop = 1024; ///< a_a
        std::size_t synthesis_hop = 1024;///< a_s
    };

    /// Throws ParameterError unless 0 < a_a <= W <= M and 0 < a_s <= W.
    void validate(const AnalysisConfig& cfg);

    /// STFT coefficients c(m, n) for bins m = 0..M/2 of a real signal.
    ///
    /// Frame n is centred on input sample `(n - lead_frames) * analysis_hop`.
    /// Lead and trail frames extend the grid past both signal edges (the
    /// signal is treated as zero there) so that every output sample is covered
    /// by the full overlap-add sum.
    struct SpectralFrames
    {
        Grid<std::complex<double>> coefficients;
        std::size_t fft_size = 0;
        std::size_t analysis_hop = 0;
        std::size_t window_length = 0;
        std::size_t lead_frames = 0;
        std::size_t signal_length = 0;
        std::uint32_t sample_rate = 0;

        std::size_t bins() const noexcept { return coefficients.bins(); }
        std::size_t frame_count() const noexcept { return coefficients.frames(); }

        /// Input sample index the frame is centred on (negative for lead frames).
        std::ptrdiff_t frame_center(std::size_t n) const noexcept
        {
            return (static_cast<std::ptrdiff_t>(n) - static_cast<std::ptrdiff_t>(lead_frames)) *
                   static_cast<std::ptrdiff_t>(analysis_hop);
        }

        /// s(m, n) = |c(m, n)|
        Grid<double> magnitude() const;
        /// phi_a(m, n) = arg c(m, n) in (-pi, pi]; zero coefficients have phase 0.
        Grid<double> phase() const;
    };

    /// arg(c) mapped to (-pi, pi], with arg(0) = 0.
    double coefficient_phase(std::complex<double> c) noexcept;

    /// Frames needed before input sample 0 so the first output samples see complete overlap.
    std::size_t lead_frame_count(const AnalysisConfig& cfg);
    /// Total frame count for a signal of `signal_length` samples.
    std::size_t frame_count(const AnalysisConfig& cfg, std::size_t signal_length);
    /// Length of the synthesized signal: ceil(L * a_s / a_a).
    std::size_t output_length(std::size_t signal_length, std::size_t analysis_hop, std::size_t synthesis_hop);

    /// c(m,n) = sum_l f(l + t_n) g_a(l) exp(-i 2 pi m l / M) with l relative to the frame centre t_n.
    SpectralFrames analyze(const Signal& signal, const AnalysisConfig& cfg);

    /// g_s(l) = (1/M) g_a(l) / sum_n g_a(l - n a_s)^2 over the window support.
    /// Throws NonInvertibleError if the denominator vanishes anywhere in the support.
    std::vector<double> dual_window(const AnalysisConfig& cfg);

    /// Overlap-add of the inverse FFT of s * exp(i phi) per frame, frames spaced by cfg.synthesis_hop.
    ///
    /// Output frame n is centred on sample `(n - lead_frames) * a_s`; the result
    /// holds samples 0..output_length()-1.
    Signal synthesize(const SpectralFrames& frames, const Grid<double>& magnitude, const Grid<double>& phase,
                      const AnalysisConfig& cfg);
}  // namespace tsm
