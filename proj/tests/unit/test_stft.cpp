#include "catch_amalgamated.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "tsm/errors.hpp"
#include "tsm/stft.hpp"
#include "tsm/window.hpp"

using namespace tsm;
using Catch::Approx;

namespace
{
    constexpr double pi = std::numbers::pi;

    AnalysisConfig default_config(std::size_t a_a = 1024, std::size_t a_s = 1024)
    {
        return { hann_window(4092), 8192, a_a, a_s };
    }

    Signal noise(std::size_t n, unsigned seed)
    {
        std::mt19937 rng(seed);
        std::normal_distribution<double> d;
        Signal s;
        s.samples.resize(n);
        for (auto& x : s.samples)
        {
            x = d(rng);
        }
        return s;
    }

    double rel_error(const Signal& a, const Signal& b)
    {
        double num = 0.0;
        double den = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k)
        {
            num += (a.samples[k] - b.samples[k]) * (a.samples[k] - b.samples[k]);
            den += a.samples[k] * a.samples[k];
        }
        return std::sqrt(num / den);
    }
}  // namespace

TEST_CASE("hann window is zero-phase and periodic", "[stft][window]")
{
    const auto w = hann_window(8);
    REQUIRE(w.size() == 8);
    CHECK(w[window_origin(8)] == Approx(1.0));
    CHECK(w[0] == Approx(0.0).margin(1e-15));
    for (std::size_t k = 1; k < 4; ++k)
    {
        CHECK(w[4 + k] == Approx(w[4 - k]));
    }
}

TEST_CASE("frame layout covers the signal", "[stft]")
{
    const auto cfg = default_config();
    CHECK(lead_frame_count(cfg) == 2);
    CHECK(output_length(88200, 512, 1024) == 176400);
    CHECK(output_length(88200, 683, 1024) == 132236);

    const Signal x = noise(10000, 1);
    const SpectralFrames f = analyze(x, cfg);
    CHECK(f.bins() == 4097);
    CHECK(f.frame_count() == frame_count(cfg, x.size()));
    CHECK(f.frame_center(f.lead_frames) == 0);
    CHECK(f.frame_center(f.frame_count() - 1) + 2046 >= static_cast<std::ptrdiff_t>(x.size()));
}

TEST_CASE("impulse at a frame instant has flat magnitude and zero phase", "[stft]")
{
    const auto cfg = default_config();
    Signal x;
    x.samples.assign(8192, 0.0);
    x.samples[2048] = 1.0;
    const SpectralFrames f = analyze(x, cfg);
    const std::size_t n = f.lead_frames + 2;
    REQUIRE(f.frame_center(n) == 2048);
    for (std::size_t m = 0; m < f.bins(); m += 97)
    {
        CHECK(std::abs(f.coefficients(m, n)) == Approx(1.0));
        CHECK(coefficient_phase(f.coefficients(m, n)) == Approx(0.0).margin(1e-12));
    }
}

TEST_CASE("coefficients match a direct DFT", "[stft]")
{
    const auto cfg = default_config();
    const double f0 = 440.0;
    Signal x;
    x.samples.resize(16384);
    for (std::size_t k = 0; k < x.size(); ++k)
    {
        x.samples[k] = std::cos(2.0 * pi * f0 * k / 44100.0 + 0.4);
    }
    const SpectralFrames f = analyze(x, cfg);
    const std::size_t n = f.lead_frames + 8;
    const std::ptrdiff_t c = f.frame_center(n);
    const auto& w = cfg.window;
    const auto o = static_cast<std::ptrdiff_t>(window_origin(w.size()));

    std::size_t peak = 0;
    for (std::size_t m = 0; m < f.bins(); ++m)
    {
        if (std::abs(f.coefficients(m, n)) > std::abs(f.coefficients(peak, n)))
        {
            peak = m;
        }
    }
    CHECK(peak == 82);

    for (std::size_t m : { std::size_t{ 0 }, std::size_t{ 80 }, std::size_t{ 82 }, std::size_t{ 85 } })
    {
        std::complex<double> acc = 0.0;
        for (std::ptrdiff_t l = -o; l < static_cast<std::ptrdiff_t>(w.size()) - o; ++l)
        {
            acc += x.samples[static_cast<std::size_t>(c + l)] * w[static_cast<std::size_t>(l + o)] *
                   std::polar(1.0, -2.0 * pi * static_cast<double>(m) * static_cast<double>(l) / 8192.0);
        }
        CHECK(std::abs(f.coefficients(m, n) - acc) < 1e-9 * (1.0 + std::abs(acc)));
    }
}

TEST_CASE("analysis is linear", "[stft]")
{
    const auto cfg = default_config();
    const Signal a = noise(6000, 2);
    const Signal b = noise(6000, 3);
    Signal s = a;
    for (std::size_t k = 0; k < s.size(); ++k)
    {
        s.samples[k] = 2.0 * a.samples[k] - 0.5 * b.samples[k];
    }
    const auto fa = analyze(a, cfg);
    const auto fb = analyze(b, cfg);
    const auto fs = analyze(s, cfg);
    double worst = 0.0;
    for (std::size_t i = 0; i < fs.coefficients.data().size(); ++i)
    {
        const auto expect = 2.0 * fa.coefficients.data()[i] - 0.5 * fb.coefficients.data()[i];
        worst = std::max(worst, std::abs(fs.coefficients.data()[i] - expect));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("per-frame Parseval relation", "[stft]")
{
    const auto cfg = default_config();
    const Signal x = noise(12000, 4);
    const auto f = analyze(x, cfg);
    const std::size_t n = f.lead_frames + 5;
    const std::ptrdiff_t c = f.frame_center(n);
    const auto o = static_cast<std::ptrdiff_t>(window_origin(4092));
    double time_energy = 0.0;
    for (std::ptrdiff_t l = -o; l < 4092 - o; ++l)
    {
        const double v = x.samples[static_cast<std::size_t>(c + l)] * cfg.window[static_cast<std::size_t>(l + o)];
        time_energy += v * v;
    }
    double freq_energy = 0.0;
    for (std::size_t m = 0; m < f.bins(); ++m)
    {
        const double weight = (m == 0 || m == 4096) ? 1.0 : 2.0;
        freq_energy += weight * std::norm(f.coefficients(m, n));
    }
    CHECK(freq_energy / 8192.0 == Approx(time_energy).epsilon(1e-10));
}

TEST_CASE("perfect reconstruction with equal hops", "[stft][property]")
{
    for (std::size_t a : { std::size_t{ 512 }, std::size_t{ 1024 } })
    {
        const auto cfg = default_config(a, a);
        const Signal x = noise(30000 + a, static_cast<unsigned>(a));
        const auto f = analyze(x, cfg);
        const Signal y = synthesize(f, f.magnitude(), f.phase(), cfg);
        REQUIRE(y.size() == x.size());
        CHECK(rel_error(x, y) < 1e-10);
    }
}

TEST_CASE("rectangular window with full overlap of one hop gives a flat dual", "[stft]")
{
    AnalysisConfig cfg{ rectangular_window(64), 64, 64, 64 };
    for (double g : dual_window(cfg))
    {
        CHECK(g == Approx(1.0 / 64.0));
    }
}

TEST_CASE("non-invertible frames are rejected", "[stft]")
{
    AnalysisConfig cfg{ hann_window(4092), 8192, 4092, 4092 };
    CHECK_THROWS_AS(dual_window(cfg), NonInvertibleError);
}

TEST_CASE("all-zero magnitude synthesizes silence", "[stft]")
{
    const auto cfg = default_config(512, 1024);
    const Signal x = noise(5000, 5);
    const auto f = analyze(x, cfg);
    const Grid<double> zero(f.bins(), f.frame_count(), 0.0);
    const Signal y = synthesize(f, zero, f.phase(), cfg);
    CHECK(y.size() == output_length(x.size(), 512, 1024));
    for (double v : y.samples)
    {
        REQUIRE(v == 0.0);
    }
}

TEST_CASE("configuration errors", "[stft][errors]")
{
    const Signal x = noise(100, 6);
    CHECK_THROWS_AS(analyze(x, { hann_window(4092), 8192, 0, 1024 }), ParameterError);
    CHECK_THROWS_AS(analyze(x, { hann_window(4092), 8192, 1024, 5000 }), ParameterError);
    CHECK_THROWS_AS(analyze(x, { hann_window(9000), 8192, 1024, 1024 }), ParameterError);
    CHECK_THROWS_AS(analyze(x, { {}, 8192, 1024, 1024 }), ParameterError);
    CHECK_THROWS_AS(analyze(Signal{}, default_config()), ParameterError);

    const auto f = analyze(x, default_config());
    const Grid<double> wrong(3, 3);
    CHECK_THROWS_AS(synthesize(f, wrong, f.phase(), default_config()), ParameterError);
}

TEST_CASE("coefficient phase conventions", "[stft]")
{
    CHECK(coefficient_phase({ 0.0, 0.0 }) == 0.0);
    CHECK(coefficient_phase({ -1.0, -0.0 }) == Approx(pi));
    CHECK(coefficient_phase({ 0.0, 1.0 }) == Approx(pi / 2));
}
