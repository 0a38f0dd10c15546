#pragma once

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "tsm/grid.hpp"
#include "tsm/pghi.hpp"
#include "tsm/stft.hpp"

namespace tsm
{
    /// Header metadata written on the first line of a grid CSV.
    struct GridInfo
    {
        std::string name;
        std::string units;
        std::string scheme = "none";
        std::size_t fft_size = 0;
        std::size_t hop = 0;
        std::size_t lead_frames = 0;
        std::uint32_t sample_rate = 0;
    };

    /// CSV grid: a `#` header line with dimensions, units and metadata, then
    /// one row per bin with one comma-separated value per frame.
    void write_grid_csv(std::ostream& out, const Grid<double>& grid, const GridInfo& info);

    /// 20 log10 |c(m, n)|, floored at -300 dB.
    Grid<double> spectrogram_db(const SpectralFrames& frames);

    /// (f_s / 2 pi) dt, in Hz.
    Grid<double> instantaneous_frequency_hz(const Grid<double>& dt, std::uint32_t sample_rate);

    /// (10^3 L / (2 pi f_s)) |df|, in milliseconds. `signal_length` is the L used for b_a = L / M.
    Grid<double> group_delay_ms(const Grid<double>& df, std::size_t signal_length, std::uint32_t sample_rate);

    /// One JSON object per line:
    /// {"frame":n,"source":{"bin":m,"frame":n-1},"target":{"bin":m,"frame":n},"direction":"time"}
    void write_trace_jsonl(std::ostream& out, const std::vector<PropagationTrace>& traces);
}  // namespace tsm
