#include "tsm/wav.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "tsm/errors.hpp"

namespace tsm
{
    namespace
    {
        constexpr std::uint16_t format_pcm = 0x0001;
        constexpr std::uint16_t format_float = 0x0003;
        constexpr std::uint16_t format_extensible = 0xFFFE;

        std::uint32_t read_u32(const unsigned char* p)
        {
            return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                   (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
        }

        std::uint16_t read_u16(const unsigned char* p)
        {
            return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
        }

        void put_u16(std::vector<unsigned char>& out, std::uint16_t v)
        {
            out.push_back(static_cast<unsigned char>(v & 0xFF));
            out.push_back(static_cast<unsigned char>(v >> 8));
        }

        void put_u32(std::vector<unsigned char>& out, std::uint32_t v)
        {
            for (int i = 0; i < 4; ++i)
            {
                out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
            }
        }

        void put_tag(std::vector<unsigned char>& out, const char* tag)
        {
            out.insert(out.end(), tag, tag + 4);
        }

        double decode_sample(const unsigned char* p, std::uint16_t tag, std::uint16_t bits)
        {
            if (tag == format_float)
            {
                if (bits == 32)
                {
                    return static_cast<double>(std::bit_cast<float>(read_u32(p)));
                }
                std::uint64_t raw = static_cast<std::uint64_t>(read_u32(p)) |
                                    (static_cast<std::uint64_t>(read_u32(p + 4)) << 32);
                return std::bit_cast<double>(raw);
            }
            switch (bits)
            {
            case 16:
                return static_cast<std::int16_t>(read_u16(p)) / 32768.0;
            case 24: {
                std::int32_t v = p[0] | (p[1] << 8) | (p[2] << 16);
                if (v & 0x800000)
                {
                    v -= 0x1000000;
                }
                return v / 8388608.0;
            }
            default:
                return static_cast<std::int32_t>(read_u32(p)) / 2147483648.0;
            }
        }

        std::int32_t quantize(double x, double scale, double lo, double hi)
        {
            return static_cast<std::int32_t>(std::clamp(std::round(x * scale), lo, hi));
        }
    }  // namespace

    const char* to_string(SampleFormat format) noexcept
    {
        switch (format)
        {
        case SampleFormat::pcm16:
            return "16";
        case SampleFormat::pcm24:
            return "24";
        case SampleFormat::float32:
            return "32f";
        }
        return "unknown";
    }

    SampleFormat parse_sample_format(std::string_view text)
    {
        if (text == "16")
        {
            return SampleFormat::pcm16;
        }
        if (text == "24")
        {
            return SampleFormat::pcm24;
        }
        if (text == "32f" || text == "float" || text == "32")
        {
            return SampleFormat::float32;
        }
        throw ParameterError("unsupported sample format '" + std::string(text) + "' (use 16, 24 or 32f)");
    }

    Signal AudioFile::channel(std::size_t index) const
    {
        if (index >= channels.size())
        {
            throw ParameterError("channel index out of range");
        }
        return Signal{ channels[index], sample_rate };
    }

    AudioFile read_wav(const std::filesystem::path& path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
        {
            throw IoError("cannot open '" + path.string() + "'");
        }
        const std::vector<unsigned char> bytes{ std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>() };
        const auto fail = [&](const std::string& why) { return IoError("'" + path.string() + "': " + why); };

        if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
            std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        {
            throw fail("not a RIFF/WAVE file");
        }

        bool have_fmt = false;
        std::uint16_t tag = 0;
        std::uint16_t channels = 0;
        std::uint32_t rate = 0;
        std::uint16_t block_align = 0;
        std::uint16_t bits = 0;
        const unsigned char* data = nullptr;
        std::size_t data_size = 0;

        std::size_t pos = 12;
        while (pos + 8 <= bytes.size())
        {
            const unsigned char* chunk = bytes.data() + pos;
            const std::size_t size = read_u32(chunk + 4);
            const std::size_t body = pos + 8;
            const std::size_t available = bytes.size() - body;
            if (std::memcmp(chunk, "fmt ", 4) == 0)
            {
                if (size < 16 || size > available)
                {
                    throw fail("truncated fmt chunk");
                }
                const unsigned char* f = bytes.data() + body;
                tag = read_u16(f);
                channels = read_u16(f + 2);
                rate = read_u32(f + 4);
                block_align = read_u16(f + 12);
                bits = read_u16(f + 14);
                if (tag == format_extensible)
                {
                    if (size < 40)
                    {
                        throw fail("truncated WAVE_FORMAT_EXTENSIBLE header");
                    }
                    tag = read_u16(f + 24);
                }
                have_fmt = true;
            }
            else if (std::memcmp(chunk, "data", 4) == 0)
            {
                data = bytes.data() + body;
                // Unfinalized streams may declare more data than the file holds.
                data_size = std::min(size, available);
            }
            pos = body + size + (size & 1);
        }

        if (!have_fmt)
        {
            throw fail("missing fmt chunk");
        }
        if (data == nullptr)
        {
            throw fail("missing data chunk");
        }
        const bool pcm_ok = tag == format_pcm && (bits == 16 || bits == 24 || bits == 32);
        const bool float_ok = tag == format_float && (bits == 32 || bits == 64);
        if (!pcm_ok && !float_ok)
        {
            throw fail("unsupported sample format (tag " + std::to_string(tag) + ", " + std::to_string(bits) +
                       " bits)");
        }
        if (channels == 0 || rate == 0 || block_align != channels * (bits / 8))
        {
            throw fail("inconsistent fmt chunk");
        }

        AudioFile audio;
        audio.sample_rate = rate;
        // 32-bit integer input has no integer writer; float32 keeps its 24 significant bits.
        audio.format = (tag == format_float || bits == 32) ? SampleFormat::float32
                       : bits == 24                        ? SampleFormat::pcm24
                                                           : SampleFormat::pcm16;
        const std::size_t frames = data_size / block_align;
        audio.channels.assign(channels, std::vector<double>(frames));
        const std::size_t width = bits / 8;
        for (std::size_t i = 0; i < frames; ++i)
        {
            for (std::size_t c = 0; c < channels; ++c)
            {
                audio.channels[c][i] = decode_sample(data + i * block_align + c * width, tag, bits);
            }
        }
        return audio;
    }

    void write_wav(const AudioFile& audio, const std::filesystem::path& path, SampleFormat format)
    {
        if (audio.channels.empty() || audio.sample_rate == 0)
        {
            throw ParameterError("write_wav: no channels or zero sample rate");
        }
        const std::size_t frames = audio.frames();
        for (const auto& ch : audio.channels)
        {
            if (ch.size() != frames)
            {
                throw ParameterError("write_wav: channels differ in length");
            }
        }
        const auto channels = static_cast<std::uint16_t>(audio.channels.size());
        const std::uint16_t bits = format == SampleFormat::pcm16 ? 16 : (format == SampleFormat::pcm24 ? 24 : 32);
        const std::uint16_t block_align = channels * (bits / 8);
        const std::uint64_t data_size = static_cast<std::uint64_t>(frames) * block_align;
        if (data_size + 36 > 0xFFFFFFFFULL)
        {
            throw IoError("write_wav: audio too long for a RIFF file");
        }

        std::vector<unsigned char> out;
        out.reserve(44 + data_size + 1);
        put_tag(out, "RIFF");
        put_u32(out, static_cast<std::uint32_t>(36 + data_size + (data_size & 1)));
        put_tag(out, "WAVE");
        put_tag(out, "fmt ");
        put_u32(out, 16);
        put_u16(out, format == SampleFormat::float32 ? format_float : format_pcm);
        put_u16(out, channels);
        put_u32(out, audio.sample_rate);
        put_u32(out, audio.sample_rate * block_align);
        put_u16(out, block_align);
        put_u16(out, bits);
        put_tag(out, "data");
        put_u32(out, static_cast<std::uint32_t>(data_size));

        for (std::size_t i = 0; i < frames; ++i)
        {
            for (const auto& ch : audio.channels)
            {
                const double x = ch[i];
                switch (format)
                {
                case SampleFormat::pcm16:
                    put_u16(out, static_cast<std::uint16_t>(quantize(x, 32768.0, -32768.0, 32767.0)));
                    break;
                case SampleFormat::pcm24: {
                    const auto v = static_cast<std::uint32_t>(quantize(x, 8388608.0, -8388608.0, 8388607.0));
                    out.push_back(static_cast<unsigned char>(v & 0xFF));
                    out.push_back(static_cast<unsigned char>((v >> 8) & 0xFF));
                    out.push_back(static_cast<unsigned char>((v >> 16) & 0xFF));
                    break;
                }
                case SampleFormat::float32:
                    put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(x)));
                    break;
                }
            }
        }
        if (data_size & 1)
        {
            out.push_back(0);
        }

        std::ofstream file(path, std::ios::binary | std::ios::trunc);
        if (!file)
        {
            throw IoError("cannot create '" + path.string() + "'");
        }
        file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
        if (!file)
        {
            throw IoError("write to '" + path.string() + "' failed");
        }
    }

    void write_wav(const Signal& signal, const std::filesystem::path& path, SampleFormat format)
    {
        AudioFile audio;
        audio.channels.push_back(signal.samples);
        audio.sample_rate = signal.sample_rate;
        write_wav(audio, path, format);
    }
}  // namespace tsm
