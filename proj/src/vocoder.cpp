#include "tsm/vocoder.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "tsm/classical_pv.hpp"
#include "tsm/window.hpp"

namespace tsm
{
    StretchParams make_params(double alpha, std::size_t synthesis_hop, std::size_t fft_size,
                              std::size_t window_length, double tol, std::size_t signal_length)
    {
        if (!(alpha > 0.0) || !std::isfinite(alpha))
        {
            throw ParameterError("stretch factor must be positive");
        }
        if (synthesis_hop == 0 || fft_size == 0 || window_length == 0 || signal_length == 0)
        {
            throw ParameterError("hop, FFT size, window length and signal length must be positive");
        }
        if (window_length > fft_size)
        {
            throw ParameterError("window length exceeds FFT size");
        }
        if (!(tol > 0.0))
        {
            throw ParameterError("tolerance must be positive");
        }
        const double ideal_hop = static_cast<double>(synthesis_hop) / alpha;
        const double rounded = std::round(ideal_hop);
        if (rounded < 1.0)
        {
            throw ParameterError("stretch factor " + std::to_string(alpha) + " rounds the analysis hop to zero; use a "
                                 "synthesis hop of at least " + std::to_string(static_cast<std::size_t>(std::ceil(alpha / 2.0))));
        }

        StretchParams p;
        p.requested_alpha = alpha;
        p.synthesis_hop = synthesis_hop;
        p.analysis_hop = static_cast<std::size_t>(rounded);
        p.effective_alpha = static_cast<double>(synthesis_hop) / static_cast<double>(p.analysis_hop);
        p.fft_size = fft_size;
        p.window_length = window_length;
        p.signal_length = signal_length;
        p.analysis_freq_step = static_cast<double>(signal_length) / static_cast<double>(fft_size);
        p.synthesis_freq_step = p.effective_alpha * p.analysis_freq_step;
        p.tol = tol;
        return p;
    }

    AnalysisConfig analysis_config(const StretchParams& params)
    {
        AnalysisConfig cfg{ hann_window(params.window_length), params.fft_size, params.analysis_hop,
                            params.synthesis_hop };
        validate(cfg);
        return cfg;
    }

    const char* to_string(Algorithm algorithm) noexcept
    {
        switch (algorithm)
        {
        case Algorithm::pghi:
            return "pghi";
        case Algorithm::classical_rect:
            return "classical_rect";
        case Algorithm::classical_trap:
            return "classical_trap";
        }
        return "unknown";
    }

    Algorithm parse_algorithm(std::string_view name)
    {
        for (auto a : { Algorithm::pghi, Algorithm::classical_rect, Algorithm::classical_trap })
        {
            if (name == to_string(a))
            {
                return a;
            }
        }
        if (name == "classical")
        {
            return Algorithm::classical_trap;
        }
        throw ParameterError("unknown algorithm '" + std::string(name) + "'");
    }

    std::uint64_t checksum(std::span<const double> values) noexcept
    {
        std::uint64_t hash = 0xcbf29ce484222325ULL;
        for (double v : values)
        {
            unsigned char bytes[sizeof(double)];
            std::memcpy(bytes, &v, sizeof v);
            for (unsigned char b : bytes)
            {
                hash ^= b;
                hash *= 0x100000001b3ULL;
            }
        }
        return hash;
    }

    namespace
    {
        /// Frames [first, end) of a grid.
        Grid<double> tail(const Grid<double>& grid, std::size_t first)
        {
            Grid<double> out(grid.bins(), grid.frames() - first);
            std::copy(grid.frame(first).begin(), grid.data().end(), out.data().begin());
            return out;
        }
    }  // namespace

    StretchReport stretch_with_report(const Signal& signal, const StretchParams& params,
                                      const StretchOptions& options)
    {
        validate(signal);
        if (params.signal_length != signal.size())
        {
            throw ParameterError("stretch parameters were derived for a different signal length");
        }
        const AnalysisConfig cfg = analysis_config(params);

        StretchReport report;
        report.params = params;

        const SpectralFrames frames = analyze(signal, cfg);
        const Grid<double> magnitude = frames.magnitude();
        const Grid<double> phase = frames.phase();
        const GradientField gradients =
            gradient_field(phase, params.analysis_hop, params.fft_size, params.analysis_freq_step, options.scheme);

        report.frame_count = frames.frame_count();
        {
            const auto c = frames.coefficients.data();
            report.coefficients_checksum = checksum({ reinterpret_cast<const double*>(c.data()), 2 * c.size() });
        }
        report.gradients_checksum = checksum(gradients.dt.data()) ^ (checksum(gradients.df.data()) * 31);
        report.analysis_magnitude_checksum = checksum(magnitude.data());

        // Lead frames sit before the frame centred on sample 0; they keep their analysis phase and
        // reconstruction starts from that frame.
        const std::size_t lead = frames.lead_frames;
        const Grid<double> mag_tail = tail(magnitude, lead);
        const GradientField grad_tail{ tail(gradients.dt, lead), tail(gradients.df, lead), gradients.scheme };
        const auto seed_phase = phase.frame(lead);

        const auto a_s = static_cast<double>(params.synthesis_hop);
        Grid<double> tail_phase;
        switch (options.algorithm)
        {
        case Algorithm::pghi:
            tail_phase = pghi_full(mag_tail, grad_tail, seed_phase, a_s, params.synthesis_freq_step,
                                   { params.tol, options.seed }, options.collect_traces ? &report.traces : nullptr);
            if (options.collect_traces)
            {
                report.traces.insert(report.traces.begin(), lead, PropagationTrace{});
            }
            break;
        case Algorithm::classical_rect:
            tail_phase = classical_full(grad_tail, seed_phase, a_s, ClassicalRule::rectangular);
            break;
        case Algorithm::classical_trap:
            tail_phase = classical_full(grad_tail, seed_phase, a_s, ClassicalRule::trapezoidal);
            break;
        }
        Grid<double> synthesis_phase = phase;
        std::copy(tail_phase.data().begin(), tail_phase.data().end(), synthesis_phase.frame(lead).begin());

        report.synthesis_magnitude_checksum = checksum(magnitude.data());
        report.output = synthesize(frames, magnitude, synthesis_phase, cfg);

        if (options.clip_guard)
        {
            double peak = 0.0;
            for (double x : report.output.samples)
            {
                peak = std::max(peak, std::abs(x));
            }
            if (peak > 1.0)
            {
                report.output_gain = 1.0 / peak;
                for (double& x : report.output.samples)
                {
                    x *= report.output_gain;
                }
            }
        }
        return report;
    }

    Signal stretch(const Signal& signal, const StretchParams& params, Algorithm algorithm, std::uint64_t seed)
    {
        StretchOptions options;
        options.algorithm = algorithm;
        options.seed = seed;
        return stretch_with_report(signal, params, options).output;
    }
}  // namespace tsm
