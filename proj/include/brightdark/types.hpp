#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace brightdark {

template <typename T>
using Complex = std::complex<T>;

template <typename T>
using MatrixX = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using VectorX = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using RowVectorX = Eigen::Matrix<T, 1, Eigen::Dynamic>;

using cdouble = Complex<double>;
using MatrixXcd = MatrixX<cdouble>;
using VectorXcd = VectorX<cdouble>;
using RowVectorXcd = RowVectorX<cdouble>;
using VectorXd = VectorX<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Base of every error raised by the library. Guard failures (cutoff overflow,
// dimension limits, invalid physical parameters) derive from it so the CLI can
// map them to a single exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class TruncationError : public Error {
public:
    using Error::Error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

/// Representative of `phase` modulo 2*pi in (-pi, pi].
template <typename T>
T wrap_phase(T phase)
{
    const T two_pi = T(2) * std::numbers::pi_v<T>;
    T r = std::fmod(phase, two_pi);
    if (r <= -std::numbers::pi_v<T>)
        r += two_pi;
    else if (r > std::numbers::pi_v<T>)
        r -= two_pi;
    return r;
}

/// Distance between two phases on the circle, in [0, pi].
template <typename T>
T phase_distance(T a, T b)
{
    return std::abs(wrap_phase(a - b));
}

} // namespace brightdark
