#include "tsm/signals.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "tsm/errors.hpp"
#include "tsm/real_fft.hpp"
#include "tsm/window.hpp"

namespace tsm
{
    namespace
    {
        constexpr double two_pi = 2.0 * std::numbers::pi;

        template <class... Ts> struct overloaded : Ts...
        {
            using Ts::operator()...;
        };

        void check_frequency(double f, double nyquist, const char* what)
        {
            if (!(f > 0.0) || !(f < nyquist))
            {
                throw ParameterError(std::string(what) + " frequency " + std::to_string(f) +
                                     " Hz is outside (0, Nyquist)");
            }
        }

        std::size_t impulse_index(double position, std::uint32_t rate)
        {
            return static_cast<std::size_t>(std::llround(position * rate));
        }

        void check_region(const Signal& signal, Region region, const char* what)
        {
            if (region.size() == 0 || region.end > signal.size())
            {
                throw ParameterError(std::string(what) + ": empty or out-of-range region");
            }
        }
    }  // namespace

    std::size_t sample_count(const TestSpec& spec)
    {
        return static_cast<std::size_t>(std::llround(spec.duration * spec.sample_rate));
    }

    void validate(const TestSpec& spec)
    {
        if (spec.sample_rate == 0)
        {
            throw ParameterError("sample rate must be positive");
        }
        if (!(spec.duration > 0.0) || sample_count(spec) == 0)
        {
            throw ParameterError("duration must cover at least one sample");
        }
        const double nyquist = spec.sample_rate / 2.0;
        const std::size_t n = sample_count(spec);
        for (const auto& component : spec.components)
        {
            std::visit(overloaded{
                           [&](const Sinusoid& s) { check_frequency(s.frequency, nyquist, "sinusoid"); },
                           [&](const LinearChirp& c) {
                               check_frequency(c.f_start, nyquist, "chirp start");
                               check_frequency(c.f_end, nyquist, "chirp end");
                           },
                           [&](const ExponentialChirp& c) {
                               check_frequency(c.f_start, nyquist, "chirp start");
                               check_frequency(c.f_end, nyquist, "chirp end");
                           },
                           [&](const Impulse& i) {
                               if (i.position < 0.0 || impulse_index(i.position, spec.sample_rate) >= n)
                               {
                                   throw ParameterError("impulse position outside the signal");
                               }
                           },
                           [&](const ImpulseTrain& t) {
                               if (!(t.period > 0.0) || t.start < 0.0 ||
                                   impulse_index(t.start, spec.sample_rate) >= n)
                               {
                                   throw ParameterError("impulse train needs a positive period and a start inside "
                                                        "the signal");
                               }
                           },
                       },
                       component);
        }
    }

    TestSpec mixture_spec(double duration, std::uint32_t sample_rate)
    {
        TestSpec spec;
        spec.duration = duration;
        spec.sample_rate = sample_rate;
        spec.components = { Sinusoid{ 1500.0, 0.3, 0.0 }, ExponentialChirp{ 200.0, 16000.0, 0.3 },
                            Impulse{ 0.6 * duration, 1.0 } };
        return spec;
    }

    double instantaneous_frequency(const LinearChirp& chirp, double duration, double t)
    {
        return chirp.f_start + (chirp.f_end - chirp.f_start) * t / duration;
    }

    double instantaneous_frequency(const ExponentialChirp& chirp, double duration, double t)
    {
        return chirp.f_start * std::pow(chirp.f_end / chirp.f_start, t / duration);
    }

    Signal generate(const TestSpec& spec)
    {
        validate(spec);
        const std::size_t n = sample_count(spec);
        const double rate = spec.sample_rate;
        const double duration = spec.duration;

        Signal out;
        out.sample_rate = spec.sample_rate;
        out.samples.assign(n, 0.0);

        for (const auto& component : spec.components)
        {
            std::visit(
                overloaded{
                    [&](const Sinusoid& s) {
                        for (std::size_t i = 0; i < n; ++i)
                        {
                            out.samples[i] += s.amplitude * std::sin(two_pi * s.frequency * (i / rate) + s.phase);
                        }
                    },
                    [&](const LinearChirp& c) {
                        const double sweep = (c.f_end - c.f_start) / duration;
                        for (std::size_t i = 0; i < n; ++i)
                        {
                            const double t = i / rate;
                            out.samples[i] += c.amplitude * std::sin(two_pi * (c.f_start * t + 0.5 * sweep * t * t));
                        }
                    },
                    [&](const ExponentialChirp& c) {
                        const double log_r = std::log(c.f_end / c.f_start) / duration;
                        for (std::size_t i = 0; i < n; ++i)
                        {
                            const double t = i / rate;
                            const double phase = log_r == 0.0 ? two_pi * c.f_start * t
                                                              : two_pi * c.f_start * std::expm1(log_r * t) / log_r;
                            out.samples[i] += c.amplitude * std::sin(phase);
                        }
                    },
                    [&](const Impulse& p) { out.samples[impulse_index(p.position, spec.sample_rate)] += p.amplitude; },
                    [&](const ImpulseTrain& t) {
                        for (std::size_t k = 0; t.count == 0 || k < t.count; ++k)
                        {
                            const std::size_t idx = impulse_index(t.start + static_cast<double>(k) * t.period,
                                                                  spec.sample_rate);
                            if (idx >= n)
                            {
                                break;
                            }
                            out.samples[idx] += t.amplitude;
                        }
                    },
                },
                component);
        }
        return out;
    }

    Region whole(const Signal& signal) noexcept
    {
        return { 0, signal.size() };
    }

    double measure_peak_frequency(const Signal& signal, Region region)
    {
        check_region(signal, region, "measure_peak_frequency");
        const std::size_t len = region.size();
        const std::size_t nfft = 4 * len;

        std::vector<double> buffer(nfft, 0.0);
        for (std::size_t i = 0; i < len; ++i)
        {
            const double w = 0.5 - 0.5 * std::cos(two_pi * (static_cast<double>(i) + 0.5) / static_cast<double>(len));
            buffer[i] = w * signal.samples[region.begin + i];
        }
        RealFft fft(nfft);
        std::vector<std::complex<double>> spectrum(fft.bins());
        fft.forward(buffer, spectrum);

        std::size_t peak = 1;
        for (std::size_t k = 1; k < spectrum.size(); ++k)
        {
            if (std::norm(spectrum[k]) > std::norm(spectrum[peak]))
            {
                peak = k;
            }
        }
        double offset = 0.0;
        if (peak + 1 < spectrum.size())
        {
            const double tiny = 1e-300;
            const double l = std::log(std::abs(spectrum[peak - 1]) + tiny);
            const double c = std::log(std::abs(spectrum[peak]) + tiny);
            const double r = std::log(std::abs(spectrum[peak + 1]) + tiny);
            const double denom = l - 2.0 * c + r;
            if (denom < 0.0)
            {
                offset = 0.5 * (l - r) / denom;
            }
        }
        return (static_cast<double>(peak) + offset) * signal.sample_rate / static_cast<double>(nfft);
    }

    double crest_factor(const Signal& signal, Region region)
    {
        check_region(signal, region, "crest_factor");
        double peak = 0.0;
        double energy = 0.0;
        for (std::size_t i = region.begin; i < region.end; ++i)
        {
            const double x = signal.samples[i];
            peak = std::max(peak, std::abs(x));
            energy += x * x;
        }
        if (energy == 0.0)
        {
            throw ParameterError("crest_factor: region is silent");
        }
        return peak / std::sqrt(energy / static_cast<double>(region.size()));
    }

    double correlation(const Signal& a, const Signal& b, Region region)
    {
        check_region(a, region, "correlation");
        check_region(b, region, "correlation");
        const auto n = static_cast<double>(region.size());
        double mean_a = 0.0;
        double mean_b = 0.0;
        for (std::size_t i = region.begin; i < region.end; ++i)
        {
            mean_a += a.samples[i];
            mean_b += b.samples[i];
        }
        mean_a /= n;
        mean_b /= n;
        double cov = 0.0;
        double var_a = 0.0;
        double var_b = 0.0;
        for (std::size_t i = region.begin; i < region.end; ++i)
        {
            const double da = a.samples[i] - mean_a;
            const double db = b.samples[i] - mean_b;
            cov += da * db;
            var_a += da * da;
            var_b += db * db;
        }
        if (var_a == 0.0 || var_b == 0.0)
        {
            throw ParameterError("correlation: constant signal in region");
        }
        return cov / std::sqrt(var_a * var_b);
    }

    double sideband_level_db(const Signal& signal, std::size_t centre, std::size_t fft_size, std::size_t guard_bins)
    {
        const std::size_t half = fft_size / 2;
        if (centre < half || centre - half + fft_size > signal.size())
        {
            throw ParameterError("sideband_level_db: frame does not fit inside the signal");
        }
        const std::vector<double> window = blackman_harris_window(fft_size);
        std::vector<double> buffer(fft_size);
        for (std::size_t k = 0; k < fft_size; ++k)
        {
            buffer[k] = window[k] * signal.samples[centre - half + k];
        }
        RealFft fft(fft_size);
        std::vector<std::complex<double>> spectrum(fft.bins());
        fft.forward(buffer, spectrum);

        std::size_t peak = 0;
        for (std::size_t k = 1; k < spectrum.size(); ++k)
        {
            if (std::norm(spectrum[k]) > std::norm(spectrum[peak]))
            {
                peak = k;
            }
        }
        const double peak_energy = std::norm(spectrum[peak]);
        if (peak_energy == 0.0)
        {
            throw ParameterError("sideband_level_db: silent frame");
        }
        double outside = 0.0;
        for (std::size_t k = 0; k < spectrum.size(); ++k)
        {
            const std::size_t distance = k > peak ? k - peak : peak - k;
            if (distance > guard_bins)
            {
                outside += std::norm(spectrum[k]);
            }
        }
        return 10.0 * std::log10(std::max(outside, 1e-300) / peak_energy);
    }
}  // namespace tsm
