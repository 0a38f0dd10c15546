#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "tsm/signal.hpp"

namespace tsm
{
    enum class SampleFormat
    {
        pcm16,
        pcm24,
        float32
    };

    const char* to_string(SampleFormat format) noexcept;
    /// Accepts "16", "24", "32f"/"float".
    SampleFormat parse_sample_format(std::string_view text);

    /// De-interleaved audio, one vector per channel, samples in [-1, 1).
    struct AudioFile
    {
        std::vector<std::vector<double>> channels;
        std::uint32_t sample_rate = 44100;
        SampleFormat format = SampleFormat::float32;  ///< format found on read

        std::size_t frames() const noexcept { return channels.empty() ? 0 : channels.front().size(); }
        Signal channel(std::size_t index) const;
    };

    /// RIFF/WAVE with PCM 16/24/32-bit integer or 32/64-bit float data, plain or WAVE_FORMAT_EXTENSIBLE.
    /// Throws IoError on unreadable files and malformed or unsupported headers.
    AudioFile read_wav(const std::filesystem::path& path);

    /// Integer formats are scaled by 2^(bits-1), rounded and clipped.
    void write_wav(const AudioFile& audio, const std::filesystem::path& path, SampleFormat format);
    void write_wav(const Signal& signal, const std::filesystem::path& path, SampleFormat format);
}  // namespace tsm
