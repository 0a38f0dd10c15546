#include "tsm/diagnostics.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include "json.hpp"

namespace tsm
{
    namespace
    {
        void put_number(std::ostream& out, double value)
        {
            char buf[32];
            const auto result = std::to_chars(buf, buf + sizeof buf, value);
            out.write(buf, result.ptr - buf);
        }
    }  // namespace

    void write_grid_csv(std::ostream& out, const Grid<double>& grid, const GridInfo& info)
    {
        out << "# grid=" << info.name << " rows=bins cols=frames bins=" << grid.bins() << " frames=" << grid.frames()
            << " units=" << info.units << " scheme=" << info.scheme << " fft_size=" << info.fft_size
            << " hop=" << info.hop << " lead_frames=" << info.lead_frames << " sample_rate=" << info.sample_rate
            << '\n';
        for (std::size_t m = 0; m < grid.bins(); ++m)
        {
            for (std::size_t n = 0; n < grid.frames(); ++n)
            {
                if (n != 0)
                {
                    out.put(',');
                }
                put_number(out, grid(m, n));
            }
            out.put('\n');
        }
    }

    Grid<double> spectrogram_db(const SpectralFrames& frames)
    {
        Grid<double> out = frames.magnitude();
        for (double& v : out.data())
        {
            v = v > 0.0 ? std::max(20.0 * std::log10(v), -300.0) : -300.0;
        }
        return out;
    }

    Grid<double> instantaneous_frequency_hz(const Grid<double>& dt, std::uint32_t sample_rate)
    {
        Grid<double> out = dt;
        const double scale = sample_rate / (2.0 * std::numbers::pi);
        for (double& v : out.data())
        {
            v *= scale;
        }
        return out;
    }

    Grid<double> group_delay_ms(const Grid<double>& df, std::size_t signal_length, std::uint32_t sample_rate)
    {
        Grid<double> out = df;
        const double scale = 1e3 * static_cast<double>(signal_length) / (2.0 * std::numbers::pi * sample_rate);
        for (double& v : out.data())
        {
            v = scale * std::abs(v);
        }
        return out;
    }

    void write_trace_jsonl(std::ostream& out, const std::vector<PropagationTrace>& traces)
    {
        for (std::size_t n = 0; n < traces.size(); ++n)
        {
            for (const PropagationStep& step : traces[n])
            {
                const std::size_t source_frame = step.source_frame == FrameTag::previous ? n - 1 : n;
                const nlohmann::json line = {
                    { "frame", n },
                    { "source", { { "bin", step.source_bin }, { "frame", source_frame } } },
                    { "target", { { "bin", step.target_bin }, { "frame", n } } },
                    { "direction", to_string(step.direction) },
                };
                out << line.dump() << '\n';
            }
        }
    }
}  // namespace tsm
