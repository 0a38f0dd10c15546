#pragma once

#include <cstddef>
#include <vector>

namespace tsm
{
    /// Windows are stored as W taps centred on the frame instant: tap k
    /// multiplies the sample at offset `k - window_origin(W)` from the centre.
    constexpr std::size_t window_origin(std::size_t length) noexcept
    {
        return length / 2;
    }

    /// Periodic Hann, g(l) = 0.5 + 0.5 cos(2 pi l / W), zero-phase (peak tap at the origin, g(-W/2) = 0).
    std::vector<double> hann_window(std::size_t length);

    std::vector<double> rectangular_window(std::size_t length);

    /// Periodic 4-term Blackman-Harris, zero-phase; -92 dB sidelobes. Used by measurement oracles.
    std::vector<double> blackman_harris_window(std::size_t length);
}  // namespace tsm
