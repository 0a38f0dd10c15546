#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tsm/grid.hpp"

namespace tsm
{
    enum class DiffScheme
    {
        backward,
        forward,
        centered
    };

    const char* to_string(DiffScheme scheme) noexcept;

    /// x - 2 pi round(x / 2 pi), result in (-pi, pi]. Exact half-integer ratios round away from zero
    /// and the -pi that would produce is reported as +pi.
    double princarg(double x) noexcept;

    // Time direction, rad/sample. Scalar kernels take the two phases being differenced.

    /// (1/a_a) princarg(phi_cur - phi_prev - 2 pi m a_a / M) + 2 pi m / M
    double heterodyned_rate(double phase_later, double phase_earlier, std::size_t bin, std::size_t hop,
                            std::size_t fft_size) noexcept;

    /// Grid forms; `phase` is bins x frames. dt_backward needs n >= 1, dt_forward n + 1 < N,
    /// dt_centered both. Out-of-range indices throw ParameterError.
    double dt_backward(const Grid<double>& phase, std::size_t m, std::size_t n, std::size_t hop, std::size_t fft_size);
    double dt_forward(const Grid<double>& phase, std::size_t m, std::size_t n, std::size_t hop, std::size_t fft_size);
    double dt_centered(const Grid<double>& phase, std::size_t m, std::size_t n, std::size_t hop, std::size_t fft_size);

    // Frequency direction, rad per b_a step: (1/b_a) princarg(neighbour phase difference).
    double df_backward(const Grid<double>& phase, std::size_t m, std::size_t n, double freq_step);
    double df_forward(const Grid<double>& phase, std::size_t m, std::size_t n, double freq_step);
    double df_centered(const Grid<double>& phase, std::size_t m, std::size_t n, double freq_step);

    /// Per-frame derivative estimates.
    struct GradientFrame
    {
        std::vector<double> dt;
        std::vector<double> df;
    };

    /// Phase derivatives over a whole grid.
    struct GradientField
    {
        Grid<double> dt;  ///< rad/sample
        Grid<double> df;  ///< rad per analysis frequency step b_a
        DiffScheme scheme = DiffScheme::centered;
    };

    /// Time derivative of one frame from its neighbours. `previous` / `next` may be empty at the
    /// grid edges, in which case the available one-sided scheme is used; with neither available
    /// the nominal bin frequency 2 pi m / M is returned.
    void time_derivative(std::span<const double> previous, std::span<const double> current,
                         std::span<const double> next, std::size_t hop, std::size_t fft_size, DiffScheme scheme,
                         std::span<double> out);

    /// Frequency derivative of one frame; edge bins fall back to one-sided differences.
    void frequency_derivative(std::span<const double> current, double freq_step, DiffScheme scheme,
                              std::span<double> out);

    /// dt and df for frame n of an analysis phase grid.
    GradientFrame gradient_frame(const Grid<double>& phase, std::size_t n, std::size_t hop, std::size_t fft_size,
                                 double freq_step, DiffScheme scheme = DiffScheme::centered);

    /// gradient_frame for every frame.
    GradientField gradient_field(const Grid<double>& phase, std::size_t hop, std::size_t fft_size, double freq_step,
                                 DiffScheme scheme = DiffScheme::centered);
}  // namespace tsm
