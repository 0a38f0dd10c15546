#include "tsm/real_fft.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>
#include <utility>

#include <fftw3.h>

#include "tsm/errors.hpp"

namespace tsm
{
    namespace
    {
        std::mutex& planner_mutex()
        {
            static std::mutex mutex;
            return mutex;
        }
    }  // namespace

    RealFft::RealFft(std::size_t size) : m_size(size)
    {
        if (size == 0)
        {
            throw ParameterError("FFT size must be positive");
        }
        const auto n = static_cast<int>(size);
        std::lock_guard lock(planner_mutex());
        m_real = fftw_alloc_real(size);
        auto* spectrum = fftw_alloc_complex(bins());
        m_complex = spectrum;
        m_forward_plan = fftw_plan_dft_r2c_1d(n, m_real, spectrum, FFTW_ESTIMATE);
        m_inverse_plan = fftw_plan_dft_c2r_1d(n, spectrum, m_real, FFTW_ESTIMATE);
    }

    RealFft::~RealFft()
    {
        release();
    }

    RealFft::RealFft(RealFft&& other) noexcept
        : m_size(std::exchange(other.m_size, 0)),
          m_real(std::exchange(other.m_real, nullptr)),
          m_complex(std::exchange(other.m_complex, nullptr)),
          m_forward_plan(std::exchange(other.m_forward_plan, nullptr)),
          m_inverse_plan(std::exchange(other.m_inverse_plan, nullptr))
    {
    }

    RealFft& RealFft::operator=(RealFft&& other) noexcept
    {
        if (this != &other)
        {
            release();
            m_size = std::exchange(other.m_size, 0);
            m_real = std::exchange(other.m_real, nullptr);
            m_complex = std::exchange(other.m_complex, nullptr);
            m_forward_plan = std::exchange(other.m_forward_plan, nullptr);
            m_inverse_plan = std::exchange(other.m_inverse_plan, nullptr);
        }
        return *this;
    }

    void RealFft::release() noexcept
    {
        if (m_real == nullptr)
        {
            return;
        }
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(static_cast<fftw_plan>(m_forward_plan));
        fftw_destroy_plan(static_cast<fftw_plan>(m_inverse_plan));
        fftw_free(m_real);
        fftw_free(m_complex);
        m_real = nullptr;
        m_complex = nullptr;
    }

    void RealFft::forward(std::span<const double> input, std::span<std::complex<double>> output)
    {
        if (input.size() != m_size || output.size() != bins())
        {
            throw ParameterError("RealFft::forward: buffer size mismatch");
        }
        std::copy(input.begin(), input.end(), m_real);
        fftw_execute(static_cast<fftw_plan>(m_forward_plan));
        // fftw_complex is layout-compatible with std::complex<double>.
        std::memcpy(output.data(), m_complex, bins() * sizeof(fftw_complex));
    }

    void RealFft::inverse(std::span<const std::complex<double>> input, std::span<double> output)
    {
        if (input.size() != bins() || output.size() != m_size)
        {
            throw ParameterError("RealFft::inverse: buffer size mismatch");
        }
        // c2r destroys its input, so it always works on the owned buffer.
        std::memcpy(m_complex, input.data(), bins() * sizeof(fftw_complex));
        fftw_execute(static_cast<fftw_plan>(m_inverse_plan));
        std::copy(m_real, m_real + m_size, output.begin());
    }
}  // namespace tsm
