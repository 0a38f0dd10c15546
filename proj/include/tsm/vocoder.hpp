#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "tsm/pghi.hpp"
#include "tsm/signal.hpp"
#include "tsm/stft.hpp"

namespace tsm
{
    /// Hop sizes and frequency steps for one stretch. The synthesis hop is fixed
    /// and the analysis hop is derived from it.
    struct StretchParams
    {
        double requested_alpha = 1.0;
        std::size_t synthesis_hop = 1024;  ///< a_s
        std::size_t analysis_hop = 1024;   ///< a_a = round(a_s / alpha)
        double effective_alpha = 1.0;      ///< a_s / a_a
        std::size_t fft_size = 8192;       ///< M
        std::size_t window_length = 4092;  ///< W
        std::size_t signal_length = 0;     ///< L
        double analysis_freq_step = 0.0;   ///< b_a = L / M
        double synthesis_freq_step = 0.0;  ///< b_s = effective_alpha * b_a
        double tol = 1e-6;
    };

    StretchParams make_params(double alpha, std::size_t synthesis_hop, std::size_t fft_size,
                              std::size_t window_length, double tol, std::size_t signal_length);

    /// Hann analysis window of the configured length plus the two hops.
    AnalysisConfig analysis_config(const StretchParams& params);

    enum class Algorithm
    {
        pghi,
        classical_rect,
        classical_trap
    };

    const char* to_string(Algorithm algorithm) noexcept;
    /// Throws ParameterError for unknown names.
    Algorithm parse_algorithm(std::string_view name);

    struct StretchOptions
    {
        Algorithm algorithm = Algorithm::pghi;
        std::uint64_t seed = 0;
        DiffScheme scheme = DiffScheme::centered;
        bool clip_guard = false;       ///< rescale the output if its peak exceeds 1
        bool collect_traces = false;   ///< pghi only
    };

    /// Output plus fingerprints of the intermediate products.
    struct StretchReport
    {
        Signal output;
        StretchParams params;
        std::size_t frame_count = 0;
        std::uint64_t coefficients_checksum = 0;
        std::uint64_t gradients_checksum = 0;
        std::uint64_t analysis_magnitude_checksum = 0;
        std::uint64_t synthesis_magnitude_checksum = 0;  ///< of the grid handed to synthesize()
        double output_gain = 1.0;                        ///< < 1 if the clip guard engaged
        std::vector<PropagationTrace> traces;
    };

    /// FNV-1a over the raw bytes.
    std::uint64_t checksum(std::span<const double> values) noexcept;

    /// analyze -> phase gradients -> phase reconstruction -> synthesize.
    StretchReport stretch_with_report(const Signal& signal, const StretchParams& params,
                                      const StretchOptions& options = {});

    Signal stretch(const Signal& signal, const StretchParams& params, Algorithm algorithm = Algorithm::pghi,
                   std::uint64_t seed = 0);
}  // namespace tsm
