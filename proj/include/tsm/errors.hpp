#pragma once

#include <stdexcept>
#include <string>

namespace tsm
{
    /// Invalid argument or configuration (hop larger than window, empty signal, mismatched grids, ...).
    class ParameterError : public std::invalid_argument
    {
    public:
        using std::invalid_argument::invalid_argument;
    };

    /// The overlap-add denominator of the dual window vanishes somewhere in the window support.
    class NonInvertibleError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// File could not be read, written or parsed.
    class IoError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };
}  // namespace tsm
