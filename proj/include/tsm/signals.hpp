#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>
#include <vector>

#include "tsm/signal.hpp"

namespace tsm
{
    /// sin(2 pi f t + phase)
    struct Sinusoid
    {
        double frequency = 440.0;
        double amplitude = 1.0;
        double phase = 0.0;
    };

    /// Frequency moves linearly from f_start (t = 0) to f_end (t = duration).
    struct LinearChirp
    {
        double f_start = 100.0;
        double f_end = 1000.0;
        double amplitude = 1.0;
    };

    /// Frequency moves geometrically: f(t) = f_start r^t, r = (f_end / f_start)^(1 / duration).
    struct ExponentialChirp
    {
        double f_start = 100.0;
        double f_end = 1000.0;
        double amplitude = 1.0;
    };

    /// Single sample at round(position * rate); position in seconds.
    struct Impulse
    {
        double position = 0.0;
        double amplitude = 1.0;
    };

    /// Impulses every `period` seconds starting at `start`; count 0 fills the duration.
    struct ImpulseTrain
    {
        double period = 0.5;
        double start = 0.0;
        std::size_t count = 0;
        double amplitude = 1.0;
    };

    using SignalComponent = std::variant<Sinusoid, LinearChirp, ExponentialChirp, Impulse, ImpulseTrain>;

    /// Sum of components over `duration` seconds.
    struct TestSpec
    {
        std::vector<SignalComponent> components;
        double duration = 1.0;
        std::uint32_t sample_rate = 44100;
    };

    /// Number of samples a spec produces: round(duration * rate).
    std::size_t sample_count(const TestSpec& spec);

    /// Throws ParameterError on frequencies outside (0, Nyquist), impulses outside the duration, etc.
    void validate(const TestSpec& spec);

    Signal generate(const TestSpec& spec);

    /// Sinusoid + exponential chirp + impulse, the standard mixture for the
    /// derivative-field diagnostics: 1500 Hz at 0.3, 200 -> 16000 Hz at 0.3, unit impulse at 60% of the duration.
    TestSpec mixture_spec(double duration = 2.0, std::uint32_t sample_rate = 44100);

    /// Analytic instantaneous frequency in Hz at time t (seconds).
    double instantaneous_frequency(const LinearChirp& chirp, double duration, double t);
    double instantaneous_frequency(const ExponentialChirp& chirp, double duration, double t);

    /// Half-open sample range [begin, end).
    struct Region
    {
        std::size_t begin = 0;
        std::size_t end = 0;

        std::size_t size() const noexcept { return end > begin ? end - begin : 0; }
    };

    Region whole(const Signal& signal) noexcept;

    /// Dominant frequency in Hz: Hann-weighted, zero-padded to 4x the region length, parabolic
    /// interpolation of the log magnitude around the peak bin.
    double measure_peak_frequency(const Signal& signal, Region region);

    /// max |x| / rms(x) over the region.
    double crest_factor(const Signal& signal, Region region);

    /// Pearson correlation of a and b over the same region of both.
    double correlation(const Signal& a, const Signal& b, Region region);

    /// Energy outside +/- guard_bins of the spectral peak relative to the peak bin, in dB.
    ///
    /// The frame of `fft_size` samples centred at `centre` is weighted with a
    /// 4-term Blackman-Harris window (no zero padding), so window sidelobes stay
    /// near -92 dB and what is measured is the signal's own spectral spread.
    double sideband_level_db(const Signal& signal, std::size_t centre, std::size_t fft_size, std::size_t guard_bins);
}  // namespace tsm
