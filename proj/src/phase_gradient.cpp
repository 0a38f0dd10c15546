#include "tsm/phase_gradient.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace tsm
{
    namespace
    {
        constexpr double two_pi = 2.0 * std::numbers::pi;

        void require(bool ok, const char* what, std::size_t m, std::size_t n)
        {
            if (!ok)
            {
                throw ParameterError(std::string(what) + ": index out of range (m=" + std::to_string(m) +
                                     ", n=" + std::to_string(n) + ")");
            }
        }

        double nominal_rate(std::size_t bin, std::size_t fft_size) noexcept
        {
            return two_pi * static_cast<double>(bin) / static_cast<double>(fft_size);
        }
    }  // namespace

    const char* to_string(DiffScheme scheme) noexcept
    {
        switch (scheme)
        {
        case DiffScheme::backward:
            return "backward";
        case DiffScheme::forward:
            return "forward";
        case DiffScheme::centered:
            return "centered";
        }
        return "unknown";
    }

    double princarg(double x) noexcept
    {
        // std::round breaks ties away from zero.
        const double wrapped = x - two_pi * std::round(x / two_pi);
        if (wrapped <= -std::numbers::pi)
        {
            return wrapped + two_pi;
        }
        if (wrapped > std::numbers::pi)
        {
            return wrapped - two_pi;
        }
        return wrapped;
    }

    double heterodyned_rate(double phase_later, double phase_earlier, std::size_t bin, std::size_t hop,
                            std::size_t fft_size) noexcept
    {
        const double a = static_cast<double>(hop);
        const double nominal = nominal_rate(bin, fft_size);
        return princarg(phase_later - phase_earlier - nominal * a) / a + nominal;
    }

    double dt_backward(const Grid<double>& phase, std::size_t m, std::size_t n, std::size_t hop, std::size_t fft_size)
    {
        require(m < phase.bins() && n >= 1 && n < phase.frames(), "dt_backward", m, n);
        return heterodyned_rate(phase(m, n), phase(m, n - 1), m, hop, fft_size);
    }

    double dt_forward(const Grid<double>& phase, std::size_t m, std::size_t n, std::size_t hop, std::size_t fft_size)
    {
        require(m < phase.bins() && n + 1 < phase.frames(), "dt_forward", m, n);
        return heterodyned_rate(phase(m, n + 1), phase(m, n), m, hop, fft_size);
    }

    double dt_centered(const Grid<double>& phase, std::size_t m, std::size_t n, std::size_t hop, std::size_t fft_size)
    {
        return 0.5 * (dt_backward(phase, m, n, hop, fft_size) + dt_forward(phase, m, n, hop, fft_size));
    }

    double df_backward(const Grid<double>& phase, std::size_t m, std::size_t n, double freq_step)
    {
        require(m >= 1 && m < phase.bins() && n < phase.frames(), "df_backward", m, n);
        return princarg(phase(m, n) - phase(m - 1, n)) / freq_step;
    }

    double df_forward(const Grid<double>& phase, std::size_t m, std::size_t n, double freq_step)
    {
        require(m + 1 < phase.bins() && n < phase.frames(), "df_forward", m, n);
        return princarg(phase(m + 1, n) - phase(m, n)) / freq_step;
    }

    double df_centered(const Grid<double>& phase, std::size_t m, std::size_t n, double freq_step)
    {
        return 0.5 * (df_backward(phase, m, n, freq_step) + df_forward(phase, m, n, freq_step));
    }

    void time_derivative(std::span<const double> previous, std::span<const double> current,
                         std::span<const double> next, std::size_t hop, std::size_t fft_size, DiffScheme scheme,
                         std::span<double> out)
    {
        const std::size_t bins = current.size();
        if (out.size() != bins || (!previous.empty() && previous.size() != bins) ||
            (!next.empty() && next.size() != bins))
        {
            throw ParameterError("time_derivative: frame length mismatch");
        }
        const bool has_prev = !previous.empty();
        const bool has_next = !next.empty();
        bool use_back = has_prev && scheme != DiffScheme::forward;
        bool use_fwd = has_next && scheme != DiffScheme::backward;
        if (!use_back && !use_fwd)
        {
            use_back = has_prev;
            use_fwd = !has_prev && has_next;
        }

        for (std::size_t m = 0; m < bins; ++m)
        {
            if (use_back && use_fwd)
            {
                const double back = heterodyned_rate(current[m], previous[m], m, hop, fft_size);
                const double fwd = heterodyned_rate(next[m], current[m], m, hop, fft_size);
                out[m] = 0.5 * (back + fwd);
            }
            else if (use_back)
            {
                out[m] = heterodyned_rate(current[m], previous[m], m, hop, fft_size);
            }
            else if (use_fwd)
            {
                out[m] = heterodyned_rate(next[m], current[m], m, hop, fft_size);
            }
            else
            {
                out[m] = nominal_rate(m, fft_size);
            }
        }
    }

    void frequency_derivative(std::span<const double> current, double freq_step, DiffScheme scheme,
                              std::span<double> out)
    {
        const std::size_t bins = current.size();
        if (out.size() != bins)
        {
            throw ParameterError("frequency_derivative: frame length mismatch");
        }
        if (!(freq_step > 0.0))
        {
            throw ParameterError("frequency_derivative: frequency step must be positive");
        }
        for (std::size_t m = 0; m < bins; ++m)
        {
            const bool has_below = m >= 1;
            const bool has_above = m + 1 < bins;
            bool use_back = has_below && scheme != DiffScheme::forward;
            bool use_fwd = has_above && scheme != DiffScheme::backward;
            if (!use_back && !use_fwd)
            {
                use_back = has_below;
                use_fwd = !has_below && has_above;
            }
            const double back = use_back ? princarg(current[m] - current[m - 1]) / freq_step : 0.0;
            const double fwd = use_fwd ? princarg(current[m + 1] - current[m]) / freq_step : 0.0;
            if (use_back && use_fwd)
            {
                out[m] = 0.5 * (back + fwd);
            }
            else
            {
                out[m] = use_back ? back : fwd;
            }
        }
    }

    GradientFrame gradient_frame(const Grid<double>& phase, std::size_t n, std::size_t hop, std::size_t fft_size,
                                 double freq_step, DiffScheme scheme)
    {
        if (n >= phase.frames())
        {
            throw ParameterError("gradient_frame: frame index out of range");
        }
        GradientFrame out{ std::vector<double>(phase.bins()), std::vector<double>(phase.bins()) };
        const std::span<const double> none;
        const auto previous = n >= 1 ? phase.frame(n - 1) : none;
        const auto next = n + 1 < phase.frames() ? phase.frame(n + 1) : none;
        time_derivative(previous, phase.frame(n), next, hop, fft_size, scheme, out.dt);
        frequency_derivative(phase.frame(n), freq_step, scheme, out.df);
        return out;
    }

    GradientField gradient_field(const Grid<double>& phase, std::size_t hop, std::size_t fft_size, double freq_step,
                                 DiffScheme scheme)
    {
        GradientField field{ Grid<double>(phase.bins(), phase.frames()), Grid<double>(phase.bins(), phase.frames()),
                             scheme };
        const std::span<const double> none;
        for (std::size_t n = 0; n < phase.frames(); ++n)
        {
            const auto previous = n >= 1 ? phase.frame(n - 1) : none;
            const auto next = n + 1 < phase.frames() ? phase.frame(n + 1) : none;
            time_derivative(previous, phase.frame(n), next, hop, fft_size, scheme, field.dt.frame(n));
            frequency_derivative(phase.frame(n), freq_step, scheme, field.df.frame(n));
        }
        return field;
    }
}  // namespace tsm
