#include "catch_amalgamated.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>

#include "tsm/errors.hpp"
#include "tsm/wav.hpp"

using namespace tsm;
namespace fs = std::filesystem;

namespace
{
    struct TempDir
    {
        fs::path path;
        TempDir() : path(fs::temp_directory_path() / ("tsm_wav_" + std::to_string(::getpid())))
        {
            fs::create_directories(path);
        }
        ~TempDir() { fs::remove_all(path); }
    };

    void put16(std::string& s, std::uint16_t v)
    {
        s.push_back(static_cast<char>(v & 0xFF));
        s.push_back(static_cast<char>(v >> 8));
    }
    void put32(std::string& s, std::uint32_t v)
    {
        put16(s, static_cast<std::uint16_t>(v & 0xFFFF));
        put16(s, static_cast<std::uint16_t>(v >> 16));
    }

    /// Minimal RIFF file: fmt chunk (optionally extensible) plus the given data body.
    std::string riff(std::uint16_t tag, std::uint16_t channels, std::uint16_t bits, const std::string& data,
                     bool extensible = false, std::uint32_t declared_data = 0)
    {
        std::string fmt;
        put16(fmt, extensible ? 0xFFFE : tag);
        put16(fmt, channels);
        put32(fmt, 8000);
        put32(fmt, 8000u * channels * bits / 8);
        put16(fmt, static_cast<std::uint16_t>(channels * bits / 8));
        put16(fmt, bits);
        if (extensible)
        {
            put16(fmt, 22);
            put16(fmt, bits);
            put32(fmt, 0);
            put16(fmt, tag);
            fmt.append(14, '\0');
        }
        std::string body = "WAVE";
        body += "fmt ";
        put32(body, static_cast<std::uint32_t>(fmt.size()));
        body += fmt;
        body += "LIST";
        put32(body, 3);
        body += "abc";
        body.push_back('\0');  // pad byte of the odd-sized chunk
        body += "data";
        put32(body, declared_data ? declared_data : static_cast<std::uint32_t>(data.size()));
        body += data;
        std::string out = "RIFF";
        put32(out, static_cast<std::uint32_t>(body.size()));
        return out + body;
    }

    fs::path write_bytes(const fs::path& path, const std::string& bytes)
    {
        std::ofstream(path, std::ios::binary) << bytes;
        return path;
    }
}  // namespace

TEST_CASE("float32 round trip is bit-exact", "[wav]")
{
    TempDir dir;
    std::mt19937 rng(1);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    Signal s;
    s.sample_rate = 48000;
    for (int i = 0; i < 1001; ++i)
    {
        s.samples.push_back(u(rng));
    }
    write_wav(s, dir.path / "f.wav", SampleFormat::float32);
    const AudioFile a = read_wav(dir.path / "f.wav");
    CHECK(a.format == SampleFormat::float32);
    CHECK(a.sample_rate == 48000);
    CHECK(a.channel(0).samples == s.samples);
}

TEST_CASE("integer round trips stay within quantisation", "[wav]")
{
    TempDir dir;
    Signal s;
    for (int i = 0; i < 500; ++i)
    {
        s.samples.push_back(std::sin(0.01 * i) * 0.99);
    }
    s.samples.push_back(1.5);  // clipped
    s.samples.push_back(-1.0);
    for (auto [format, bound] : { std::pair{ SampleFormat::pcm16, std::ldexp(1.0, -15) },
                                  std::pair{ SampleFormat::pcm24, std::ldexp(1.0, -23) } })
    {
        write_wav(s, dir.path / "i.wav", format);
        const AudioFile a = read_wav(dir.path / "i.wav");
        CHECK(a.format == format);
        REQUIRE(a.frames() == s.size());
        for (std::size_t k = 0; k + 2 < s.size(); ++k)
        {
            REQUIRE(std::abs(a.channels[0][k] - s.samples[k]) <= bound);
        }
        CHECK(a.channels[0][s.size() - 2] == Catch::Approx(1.0).margin(bound));
        CHECK(a.channels[0][s.size() - 1] == -1.0);
    }
}

TEST_CASE("multichannel layout is interleaved", "[wav]")
{
    TempDir dir;
    AudioFile a;
    a.sample_rate = 22050;
    a.channels = { { 0.5, 0.25, 0.0 }, { -0.5, -0.25, 0.125 } };
    write_wav(a, dir.path / "st.wav", SampleFormat::pcm16);
    const AudioFile b = read_wav(dir.path / "st.wav");
    REQUIRE(b.channels.size() == 2);
    CHECK(b.channels == a.channels);
    CHECK(b.channel(1).sample_rate == 22050);
    CHECK_THROWS_AS(b.channel(2), ParameterError);
    // odd data size gets a pad byte
    AudioFile odd;
    odd.channels = { { 0.1 } };
    write_wav(odd, dir.path / "odd.wav", SampleFormat::pcm24);
    CHECK(fs::file_size(dir.path / "odd.wav") == 44 + 3 + 1);
    CHECK(read_wav(dir.path / "odd.wav").frames() == 1);
}

TEST_CASE("other encodings are decoded", "[wav]")
{
    TempDir dir;
    SECTION("32-bit integer")
    {
        std::string data;
        put32(data, 0x40000000u);
        put32(data, 0x80000000u);
        const AudioFile a = read_wav(write_bytes(dir.path / "i32.wav", riff(1, 1, 32, data)));
        CHECK(a.channels[0] == std::vector<double>{ 0.5, -1.0 });
        CHECK(a.format == SampleFormat::float32);
    }
    SECTION("64-bit float in an extensible header")
    {
        std::string data;
        for (double v : { 0.25, -0.75 })
        {
            const auto bits = std::bit_cast<std::uint64_t>(v);
            put32(data, static_cast<std::uint32_t>(bits));
            put32(data, static_cast<std::uint32_t>(bits >> 32));
        }
        const AudioFile a = read_wav(write_bytes(dir.path / "f64.wav", riff(3, 1, 64, data, true)));
        CHECK(a.channels[0] == std::vector<double>{ 0.25, -0.75 });
        CHECK(a.sample_rate == 8000);
    }
    SECTION("oversized data chunk is clamped")
    {
        std::string data;
        put16(data, 0x4000);
        put16(data, 0xC000);
        const AudioFile a = read_wav(write_bytes(dir.path / "big.wav", riff(1, 1, 16, data, false, 1000)));
        CHECK(a.channels[0] == std::vector<double>{ 0.5, -0.5 });
    }
}

TEST_CASE("malformed files raise I/O errors", "[wav][errors]")
{
    TempDir dir;
    CHECK_THROWS_AS(read_wav(dir.path / "missing.wav"), IoError);
    CHECK_THROWS_AS(read_wav(write_bytes(dir.path / "junk.wav", "hello world, not audio")), IoError);
    CHECK_THROWS_AS(read_wav(write_bytes(dir.path / "u8.wav", riff(1, 1, 8, "ab"))), IoError);
    CHECK_THROWS_AS(read_wav(write_bytes(dir.path / "alaw.wav", riff(6, 1, 16, "ab"))), IoError);

    std::string no_data = riff(1, 1, 16, "");
    no_data.resize(no_data.size() - 8);
    CHECK_THROWS_AS(read_wav(write_bytes(dir.path / "nodata.wav", no_data)), IoError);

    std::string no_fmt = "RIFF";
    put32(no_fmt, 12);
    no_fmt += "WAVEdata";
    put32(no_fmt, 0);
    CHECK_THROWS_AS(read_wav(write_bytes(dir.path / "nofmt.wav", no_fmt)), IoError);

    CHECK_THROWS_AS(write_wav(AudioFile{}, dir.path / "x.wav", SampleFormat::pcm16), ParameterError);
    CHECK_THROWS_AS(write_wav(Signal{ { 0.0 }, 44100 }, dir.path / "nodir" / "x.wav", SampleFormat::pcm16),
                    IoError);
}

TEST_CASE("sample format names", "[wav]")
{
    CHECK(parse_sample_format("16") == SampleFormat::pcm16);
    CHECK(parse_sample_format("24") == SampleFormat::pcm24);
    CHECK(parse_sample_format("32f") == SampleFormat::float32);
    CHECK(parse_sample_format("float") == SampleFormat::float32);
    CHECK_THROWS_AS(parse_sample_format("8"), ParameterError);
}
