#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace tsm
{
    /// Unnormalized real-to-half-complex transform pair of fixed size, backed by FFTW.
    ///
    /// forward():  X(m) = sum_q x(q) exp(-i 2 pi m q / M),  m = 0..M/2
    /// inverse():  x(q) = sum_{m=0}^{M-1} X(m) exp(+i 2 pi m q / M), the upper half
    ///             implied by conjugate symmetry. No 1/M factor is applied.
    ///
    /// Plans are created under a process-wide lock; executing distinct instances
    /// from different threads is safe. One instance must not be shared between threads.
    class RealFft
    {
    public:
        explicit RealFft(std::size_t size);
        ~RealFft();

        RealFft(const RealFft&) = delete;
        RealFft& operator=(const RealFft&) = delete;
        RealFft(RealFft&& other) noexcept;
        RealFft& operator=(RealFft&& other) noexcept;

        std::size_t size() const noexcept { return m_size; }
        std::size_t bins() const noexcept { return m_size / 2 + 1; }

        /// `input.size() == size()`, `output.size() == bins()`.
        void forward(std::span<const double> input, std::span<std::complex<double>> output);
        /// `input.size() == bins()`, `output.size() == size()`.
        void inverse(std::span<const std::complex<double>> input, std::span<double> output);

    private:
        void release() noexcept;

        std::size_t m_size = 0;
        double* m_real = nullptr;
        void* m_complex = nullptr;
        void* m_forward_plan = nullptr;
        void* m_inverse_plan = nullptr;
    };
}  // namespace tsm
