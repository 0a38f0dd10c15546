#pragma once

#include <cstdint>
#include <vector>

namespace tsm
{
    /// Mono sample buffer.
    struct Signal
    {
        std::vector<double> samples;
        std::uint32_t sample_rate = 44100;

        std::size_t size() const noexcept { return samples.size(); }
    };

    /// Throws ParameterError unless the signal is non-empty, finite and has a positive rate.
    void validate(const Signal& signal);
}  // namespace tsm
