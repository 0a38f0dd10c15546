#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tsm/errors.hpp"

namespace tsm
{
    /// Dense time-frequency grid of `bins x frames` values.
    ///
    /// Storage is frame-major: the bins of one frame are contiguous, so a
    /// single frame is available as a span without copying.
    template <typename T> class Grid
    {
    public:
        Grid() = default;
        Grid(std::size_t bins, std::size_t frames, T fill = T{})
            : m_bins(bins), m_frames(frames), m_data(bins * frames, fill)
        {
        }

        std::size_t bins() const noexcept { return m_bins; }
        std::size_t frames() const noexcept { return m_frames; }
        bool empty() const noexcept { return m_data.empty(); }

        T& operator()(std::size_t m, std::size_t n) noexcept { return m_data[n * m_bins + m]; }
        const T& operator()(std::size_t m, std::size_t n) const noexcept { return m_data[n * m_bins + m]; }

        std::span<T> frame(std::size_t n) noexcept { return { m_data.data() + n * m_bins, m_bins }; }
        std::span<const T> frame(std::size_t n) const noexcept { return { m_data.data() + n * m_bins, m_bins }; }

        std::span<T> data() noexcept { return m_data; }
        std::span<const T> data() const noexcept { return m_data; }

        bool same_shape(const Grid& other) const noexcept
        {
            return m_bins == other.m_bins && m_frames == other.m_frames;
        }

        friend bool operator==(const Grid&, const Grid&) = default;

    private:
        std::size_t m_bins = 0;
        std::size_t m_frames = 0;
        std::vector<T> m_data;
    };

    template <typename A, typename B> void require_same_shape(const Grid<A>& a, const Grid<B>& b, const char* what)
    {
        if (a.bins() != b.bins() || a.frames() != b.frames())
        {
            throw ParameterError(std::string(what) + ": grid dimensions differ");
        }
    }
}  // namespace tsm
