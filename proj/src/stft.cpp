#include "tsm/stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "tsm/real_fft.hpp"
#include "tsm/window.hpp"

namespace tsm
{
    namespace
    {
        std::size_t ceil_div(std::size_t num, std::size_t den)
        {
            return (num + den - 1) / den;
        }

        /// Buffer slot of window offset l in a length-M zero-phase FFT buffer.
        std::size_t rotated_index(std::ptrdiff_t offset, std::size_t fft_size)
        {
            const auto m = static_cast<std::ptrdiff_t>(fft_size);
            return static_cast<std::size_t>(((offset % m) + m) % m);
        }
    }  // namespace

    void validate(const Signal& signal)
    {
        if (signal.samples.empty())
        {
            throw ParameterError("signal is empty");
        }
        if (signal.sample_rate == 0)
        {
            throw ParameterError("sample rate must be positive");
        }
        if (!std::all_of(signal.samples.begin(), signal.samples.end(), [](double x) { return std::isfinite(x); }))
        {
            throw ParameterError("signal contains non-finite samples");
        }
    }

    void validate(const AnalysisConfig& cfg)
    {
        const std::size_t w = cfg.window.size();
        if (w == 0)
        {
            throw ParameterError("window is empty");
        }
        if (!std::all_of(cfg.window.begin(), cfg.window.end(), [](double x) { return std::isfinite(x); }))
        {
            throw ParameterError("window contains non-finite taps");
        }
        if (w > cfg.fft_size)
        {
            throw ParameterError("window length " + std::to_string(w) + " exceeds FFT size " +
                                 std::to_string(cfg.fft_size));
        }
        if (cfg.analysis_hop == 0 || cfg.analysis_hop > w)
        {
            throw ParameterError("analysis hop must be in [1, window length], got " + std::to_string(cfg.analysis_hop));
        }
        if (cfg.synthesis_hop == 0 || cfg.synthesis_hop > w)
        {
            throw ParameterError("synthesis hop must be in [1, window length], got " +
                                 std::to_string(cfg.synthesis_hop));
        }
    }

    double coefficient_phase(std::complex<double> c) noexcept
    {
        if (c.real() == 0.0 && c.imag() == 0.0)
        {
            return 0.0;
        }
        const double phi = std::atan2(c.imag(), c.real());
        return phi == -std::numbers::pi ? std::numbers::pi : phi;
    }

    Grid<double> SpectralFrames::magnitude() const
    {
        Grid<double> out(coefficients.bins(), coefficients.frames());
        std::transform(coefficients.data().begin(), coefficients.data().end(), out.data().begin(),
                       [](std::complex<double> c) { return std::abs(c); });
        return out;
    }

    Grid<double> SpectralFrames::phase() const
    {
        Grid<double> out(coefficients.bins(), coefficients.frames());
        std::transform(coefficients.data().begin(), coefficients.data().end(), out.data().begin(),
                       coefficient_phase);
        return out;
    }

    std::size_t lead_frame_count(const AnalysisConfig& cfg)
    {
        validate(cfg);
        const std::size_t w = cfg.window.size();
        const std::size_t right_extent = w - window_origin(w) - 1;
        return ceil_div(right_extent, std::min(cfg.analysis_hop, cfg.synthesis_hop));
    }

    std::size_t output_length(std::size_t signal_length, std::size_t analysis_hop, std::size_t synthesis_hop)
    {
        if (analysis_hop == 0)
        {
            throw ParameterError("analysis hop must be positive");
        }
        return ceil_div(signal_length * synthesis_hop, analysis_hop);
    }

    std::size_t frame_count(const AnalysisConfig& cfg, std::size_t signal_length)
    {
        const std::size_t lead = lead_frame_count(cfg);
        const std::size_t origin = window_origin(cfg.window.size());
        const std::size_t out_len = output_length(signal_length, cfg.analysis_hop, cfg.synthesis_hop);
        const std::size_t in_frames = ceil_div(signal_length - 1 + origin, cfg.analysis_hop);
        const std::size_t out_frames = ceil_div(out_len - 1 + origin, cfg.synthesis_hop);
        return lead + 1 + std::max(in_frames, out_frames);
    }

    SpectralFrames analyze(const Signal& signal, const AnalysisConfig& cfg)
    {
        validate(signal);
        validate(cfg);

        const std::size_t w = cfg.window.size();
        const std::size_t m = cfg.fft_size;
        const auto origin = static_cast<std::ptrdiff_t>(window_origin(w));
        const auto length = static_cast<std::ptrdiff_t>(signal.size());

        SpectralFrames frames;
        frames.fft_size = m;
        frames.analysis_hop = cfg.analysis_hop;
        frames.window_length = w;
        frames.lead_frames = lead_frame_count(cfg);
        frames.signal_length = signal.size();
        frames.sample_rate = signal.sample_rate;
        frames.coefficients = Grid<std::complex<double>>(m / 2 + 1, frame_count(cfg, signal.size()));

        RealFft fft(m);
        std::vector<double> buffer(m);
        for (std::size_t n = 0; n < frames.frame_count(); ++n)
        {
            std::fill(buffer.begin(), buffer.end(), 0.0);
            const std::ptrdiff_t centre = frames.frame_center(n);
            for (std::size_t k = 0; k < w; ++k)
            {
                const std::ptrdiff_t offset = static_cast<std::ptrdiff_t>(k) - origin;
                const std::ptrdiff_t idx = centre + offset;
                if (idx >= 0 && idx < length)
                {
                    buffer[rotated_index(offset, m)] = signal.samples[static_cast<std::size_t>(idx)] * cfg.window[k];
                }
            }
            fft.forward(buffer, frames.coefficients.frame(n));
        }
        return frames;
    }

    std::vector<double> dual_window(const AnalysisConfig& cfg)
    {
        validate(cfg);
        const std::size_t w = cfg.window.size();
        const std::size_t hop = cfg.synthesis_hop;
        const double m = static_cast<double>(cfg.fft_size);

        std::vector<double> dual(w);
        for (std::size_t k = 0; k < w; ++k)
        {
            // Every tap congruent to k modulo the hop overlaps sample k.
            double denom = 0.0;
            for (std::size_t j = k % hop; j < w; j += hop)
            {
                denom += cfg.window[j] * cfg.window[j];
            }
            if (!(denom > 0.0))
            {
                throw NonInvertibleError("dual window undefined: overlap-add denominator is zero at tap " +
                                         std::to_string(k) + " (window length " + std::to_string(w) + ", hop " +
                                         std::to_string(hop) + ")");
            }
            dual[k] = cfg.window[k] / (m * denom);
        }
        return dual;
    }

    Signal synthesize(const SpectralFrames& frames, const Grid<double>& magnitude, const Grid<double>& phase,
                      const AnalysisConfig& cfg)
    {
        require_same_shape(magnitude, phase, "synthesize");
        if (magnitude.bins() != frames.bins() || magnitude.frames() != frames.frame_count())
        {
            throw ParameterError("synthesize: grids do not match the analysed frames");
        }
        if (cfg.fft_size != frames.fft_size || cfg.window.size() != frames.window_length)
        {
            throw ParameterError("synthesize: configuration does not match the analysed frames");
        }
        const std::vector<double> gs = dual_window(cfg);

        const std::size_t w = cfg.window.size();
        const std::size_t m = cfg.fft_size;
        const auto origin = static_cast<std::ptrdiff_t>(window_origin(w));
        const auto hop = static_cast<std::ptrdiff_t>(cfg.synthesis_hop);
        const auto lead = static_cast<std::ptrdiff_t>(frames.lead_frames);

        Signal out;
        out.sample_rate = frames.sample_rate;
        out.samples.assign(output_length(frames.signal_length, frames.analysis_hop, cfg.synthesis_hop), 0.0);
        const auto out_len = static_cast<std::ptrdiff_t>(out.samples.size());

        RealFft fft(m);
        std::vector<std::complex<double>> spectrum(frames.bins());
        std::vector<double> frame(m);
        for (std::size_t n = 0; n < frames.frame_count(); ++n)
        {
            const std::ptrdiff_t centre = (static_cast<std::ptrdiff_t>(n) - lead) * hop;
            if (centre + static_cast<std::ptrdiff_t>(w) - origin <= 0 || centre - origin >= out_len)
            {
                continue;
            }
            const auto s = magnitude.frame(n);
            const auto phi = phase.frame(n);
            for (std::size_t b = 0; b < spectrum.size(); ++b)
            {
                spectrum[b] = std::polar(s[b], phi[b]);
            }
            fft.inverse(spectrum, frame);
            for (std::size_t k = 0; k < w; ++k)
            {
                const std::ptrdiff_t offset = static_cast<std::ptrdiff_t>(k) - origin;
                const std::ptrdiff_t idx = centre + offset;
                if (idx >= 0 && idx < out_len)
                {
                    out.samples[static_cast<std::size_t>(idx)] += gs[k] * frame[rotated_index(offset, m)];
                }
            }
        }
        return out;
    }
}  // namespace tsm
