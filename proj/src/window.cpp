#include "tsm/window.hpp"

#include <cmath>
#include <numbers>

#include "tsm/errors.hpp"

namespace tsm
{
    namespace
    {
        template <typename F> std::vector<double> centred(std::size_t length, F&& shape)
        {
            if (length == 0)
            {
                throw ParameterError("window length must be positive");
            }
            std::vector<double> taps(length);
            const auto origin = static_cast<double>(window_origin(length));
            for (std::size_t k = 0; k < length; ++k)
            {
                const double x = 2.0 * std::numbers::pi * (static_cast<double>(k) - origin) / static_cast<double>(length);
                taps[k] = shape(x);
            }
            return taps;
        }
    }  // namespace

    std::vector<double> hann_window(std::size_t length)
    {
        return centred(length, [](double x) { return 0.5 + 0.5 * std::cos(x); });
    }

    std::vector<double> rectangular_window(std::size_t length)
    {
        if (length == 0)
        {
            throw ParameterError("window length must be positive");
        }
        return std::vector<double>(length, 1.0);
    }

    std::vector<double> blackman_harris_window(std::size_t length)
    {
        return centred(length, [](double x) {
            return 0.35875 + 0.48829 * std::cos(x) + 0.14128 * std::cos(2.0 * x) + 0.01168 * std::cos(3.0 * x);
        });
    }
}  // namespace tsm
