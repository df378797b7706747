#pragma once

// Truncated Fock-space numerics: multi-mode pure states, density matrices,
// ladder operators and partial traces. Everything here is dense and templated
// on the real scalar type; the rest of the library uses the double aliases at
// the bottom of this file.
//
// Flattening is little-endian mixed radix: mode 0 is the fastest-varying
// digit, so for cutoffs (c0, c1, ...) the occupation tuple (n0, n1, ...) sits
// at index n0 + (c0+1) * (n1 + (c1+1) * (n2 + ...)).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "brightdark/types.hpp"

namespace brightdark {

inline constexpr std::size_t kMaxFockDimension = 10'000'000;

class ModeSpace {
public:
    ModeSpace() = default;

    explicit ModeSpace(std::vector<int> cutoffs) : cutoffs_(std::move(cutoffs))
    {
        if (cutoffs_.empty())
            throw DimensionError("ModeSpace needs at least one mode");
        strides_.resize(cutoffs_.size());
        std::size_t dim = 1;
        for (std::size_t m = 0; m < cutoffs_.size(); ++m) {
            if (cutoffs_[m] < 1)
                throw DimensionError("mode cutoff must be >= 1, got " + std::to_string(cutoffs_[m]));
            strides_[m] = dim;
            const auto levels = static_cast<std::size_t>(cutoffs_[m]) + 1;
            if (dim > kMaxFockDimension / levels)
                throw DimensionError("Fock dimension exceeds guard of 1e7 amplitudes");
            dim *= levels;
        }
        dimension_ = dim;
    }

    std::size_t mode_count() const { return cutoffs_.size(); }
    int cutoff(std::size_t mode) const { return cutoffs_.at(mode); }
    const std::vector<int>& cutoffs() const { return cutoffs_; }
    std::size_t dimension() const { return dimension_; }
    std::size_t stride(std::size_t mode) const { return strides_.at(mode); }

    int occupation(std::size_t index, std::size_t mode) const
    {
        return static_cast<int>((index / strides_[mode]) % (static_cast<std::size_t>(cutoffs_[mode]) + 1));
    }

    std::size_t index_of(std::span<const int> occupations) const
    {
        if (occupations.size() != cutoffs_.size())
            throw DimensionError("occupation tuple length does not match mode count");
        std::size_t idx = 0;
        for (std::size_t m = 0; m < cutoffs_.size(); ++m) {
            if (occupations[m] < 0 || occupations[m] > cutoffs_[m])
                throw DimensionError("occupation outside cutoff");
            idx += static_cast<std::size_t>(occupations[m]) * strides_[m];
        }
        return idx;
    }

    /// Space of `a`'s modes followed by `b`'s modes.
    static ModeSpace concat(const ModeSpace& a, const ModeSpace& b)
    {
        std::vector<int> c = a.cutoffs_;
        c.insert(c.end(), b.cutoffs_.begin(), b.cutoffs_.end());
        return ModeSpace(std::move(c));
    }

    friend bool operator==(const ModeSpace& a, const ModeSpace& b) { return a.cutoffs_ == b.cutoffs_; }

private:
    std::vector<int> cutoffs_;
    std::vector<std::size_t> strides_;
    std::size_t dimension_ = 0;
};

template <typename T>
class MultiModeState {
public:
    using Scalar = Complex<T>;
    using Vector = VectorX<Scalar>;

    MultiModeState(ModeSpace space, Vector amplitudes)
        : space_(std::move(space)), amplitudes_(std::move(amplitudes))
    {
        if (static_cast<std::size_t>(amplitudes_.size()) != space_.dimension())
            throw DimensionError("amplitude vector length does not match ModeSpace dimension");
        if (!amplitudes_.allFinite())
            throw DomainError("state amplitudes must be finite");
    }

    const ModeSpace& space() const { return space_; }
    const Vector& amplitudes() const { return amplitudes_; }
    Scalar amplitude(std::size_t index) const { return amplitudes_(static_cast<Eigen::Index>(index)); }

    T norm() const { return amplitudes_.norm(); }
    // Reported, never corrected: callers decide what a deviation means.
    T norm_deviation() const { return std::abs(norm() - T(1)); }

private:
    ModeSpace space_;
    Vector amplitudes_;
};

template <typename T>
class DensityMatrix {
public:
    using Scalar = Complex<T>;
    using Matrix = MatrixX<Scalar>;

    DensityMatrix(ModeSpace space, Matrix elements)
        : space_(std::move(space)), elements_(std::move(elements))
    {
        const auto d = static_cast<Eigen::Index>(space_.dimension());
        if (elements_.rows() != d || elements_.cols() != d)
            throw DimensionError("density matrix shape does not match ModeSpace dimension");
        if (!elements_.allFinite())
            throw DomainError("density matrix entries must be finite");
        const T scale = std::max(T(1), elements_.cwiseAbs().maxCoeff());
        if (hermiticity_error() > T(1e-12) * scale)
            throw DomainError("density matrix is not Hermitian within 1e-12");
    }

    const ModeSpace& space() const { return space_; }
    const Matrix& elements() const { return elements_; }
    Scalar operator()(Eigen::Index i, Eigen::Index j) const { return elements_(i, j); }

    T hermiticity_error() const { return (elements_ - elements_.adjoint()).cwiseAbs().maxCoeff(); }
    Scalar trace() const { return elements_.trace(); }

    T min_eigenvalue() const
    {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(elements_, Eigen::EigenvaluesOnly);
        return solver.eigenvalues().minCoeff();
    }

    VectorX<T> eigenvalues() const
    {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(elements_, Eigen::EigenvaluesOnly);
        return solver.eigenvalues();
    }

private:
    ModeSpace space_;
    Matrix elements_;
};

/// Per-mode cutoff that keeps a coherent state's neglected tail below 1e-12
/// for |alpha| up to about 4.
template <typename T>
int coherent_cutoff(Complex<T> alpha)
{
    const T a = std::abs(alpha);
    return std::max(15, static_cast<int>(std::ceil(a * a + T(8) * a + T(10))));
}

/// Probability mass of a coherent state above Fock level `cutoff`, summed
/// directly from the Poisson series rather than as 1 - retained.
template <typename T>
T coherent_tail(T abs_alpha, int cutoff)
{
    const T lambda = abs_alpha * abs_alpha;
    if (lambda == T(0))
        return T(0);
    // log p_n = -lambda + n log lambda - log n!
    T tail = 0;
    for (int n = cutoff + 1;; ++n) {
        const T logp = -lambda + T(n) * std::log(lambda) - std::lgamma(T(n) + T(1));
        const T p = std::exp(logp);
        tail += p;
        if (T(n) > lambda && (p == T(0) || p < tail * std::numeric_limits<T>::epsilon()))
            break;
        if (n > cutoff + 100000)
            break;
    }
    return tail;
}

template <typename T>
MultiModeState<T> vacuum(const ModeSpace& space)
{
    typename MultiModeState<T>::Vector v = MultiModeState<T>::Vector::Zero(static_cast<Eigen::Index>(space.dimension()));
    v(0) = T(1);
    return {space, std::move(v)};
}

template <typename T>
MultiModeState<T> fock_state(int n, int cutoff)
{
    if (n < 0 || n > cutoff)
        throw TruncationError("Fock level " + std::to_string(n) + " outside cutoff " + std::to_string(cutoff));
    ModeSpace space({cutoff});
    typename MultiModeState<T>::Vector v = MultiModeState<T>::Vector::Zero(cutoff + 1);
    v(n) = T(1);
    return {space, std::move(v)};
}

/// Single-mode coherent state truncated at `cutoff`. Throws TruncationError
/// when the discarded tail exceeds `tail_tolerance`.
template <typename T>
MultiModeState<T> coherent_state(Complex<T> alpha, int cutoff, T tail_tolerance = T(1e-12))
{
    ModeSpace space({cutoff});
    const T tail = coherent_tail(std::abs(alpha), cutoff);
    if (tail >= tail_tolerance)
        throw TruncationError("coherent state |alpha|=" + std::to_string(static_cast<double>(std::abs(alpha))) +
                              " needs a cutoff above " + std::to_string(cutoff) + " (tail " +
                              std::to_string(static_cast<double>(tail)) + ")");
    typename MultiModeState<T>::Vector c(cutoff + 1);
    c(0) = std::exp(-std::norm(alpha) / T(2));
    for (int n = 1; n <= cutoff; ++n)
        c(n) = c(n - 1) * alpha / std::sqrt(T(n));
    return {space, std::move(c)};
}

/// a|psi> on `mode`, unnormalized.
template <typename T>
MultiModeState<T> apply_annihilate(const MultiModeState<T>& state, std::size_t mode)
{
    const ModeSpace& s = state.space();
    if (mode >= s.mode_count())
        throw DimensionError("mode index out of range");
    const auto& in = state.amplitudes();
    typename MultiModeState<T>::Vector out = MultiModeState<T>::Vector::Zero(in.size());
    const std::size_t stride = s.stride(mode);
    for (std::size_t i = 0; i < s.dimension(); ++i) {
        const int n = s.occupation(i, mode);
        if (n > 0)
            out(static_cast<Eigen::Index>(i - stride)) = std::sqrt(T(n)) * in(static_cast<Eigen::Index>(i));
    }
    return {s, std::move(out)};
}

/// a^dagger|psi> on `mode`, unnormalized. Population sitting on the top Fock
/// level would be pushed out of the space; more than `overflow_tolerance` of it
/// is a TruncationError.
template <typename T>
MultiModeState<T> apply_create(const MultiModeState<T>& state, std::size_t mode, T overflow_tolerance = T(1e-12))
{
    const ModeSpace& s = state.space();
    if (mode >= s.mode_count())
        throw DimensionError("mode index out of range");
    const auto& in = state.amplitudes();
    const int top = s.cutoff(mode);
    const std::size_t stride = s.stride(mode);
    T overflow = 0;
    typename MultiModeState<T>::Vector out = MultiModeState<T>::Vector::Zero(in.size());
    for (std::size_t i = 0; i < s.dimension(); ++i) {
        const int n = s.occupation(i, mode);
        const auto a = in(static_cast<Eigen::Index>(i));
        if (n == top)
            overflow += std::norm(a);
        else
            out(static_cast<Eigen::Index>(i + stride)) = std::sqrt(T(n + 1)) * a;
    }
    if (overflow > overflow_tolerance)
        throw TruncationError("photon addition overflows cutoff " + std::to_string(top) + " (top-level population " +
                              std::to_string(static_cast<double>(overflow)) + ")");
    return {s, std::move(out)};
}

template <typename T>
struct PhotonAdded {
    MultiModeState<T> state; // normalized a^dagger|psi>
    T norm;                  // ||a^dagger|psi>|| before normalization
};

/// Normalized photon-added state plus its norm factor; for a coherent input
/// the factor is sqrt(1 + |alpha|^2).
template <typename T>
PhotonAdded<T> photon_add(const MultiModeState<T>& state, std::size_t mode, T overflow_tolerance = T(1e-12))
{
    if (state.norm_deviation() > T(1e-9))
        throw DomainError("photon_add expects a normalized state");
    auto raised = apply_create(state, mode, overflow_tolerance);
    const T n = raised.norm();
    if (n == T(0))
        throw DomainError("photon addition produced the zero vector");
    return {MultiModeState<T>(raised.space(), raised.amplitudes() / n), n};
}

/// Kronecker composition; `a`'s modes come first (least significant).
template <typename T>
MultiModeState<T> tensor(const MultiModeState<T>& a, const MultiModeState<T>& b)
{
    ModeSpace space = ModeSpace::concat(a.space(), b.space());
    const Eigen::Index da = a.amplitudes().size();
    const Eigen::Index db = b.amplitudes().size();
    typename MultiModeState<T>::Vector v(da * db);
    for (Eigen::Index j = 0; j < db; ++j)
        v.segment(j * da, da) = a.amplitudes() * b.amplitudes()(j);
    return {std::move(space), std::move(v)};
}

/// <a|b>, conjugate-linear in the first argument.
template <typename T>
Complex<T> overlap(const MultiModeState<T>& a, const MultiModeState<T>& b)
{
    if (!(a.space() == b.space()))
        throw DimensionError("overlap between states on different mode spaces");
    return a.amplitudes().dot(b.amplitudes());
}

template <typename T>
T mean_photon_number(const MultiModeState<T>& state, std::size_t mode)
{
    const ModeSpace& s = state.space();
    T sum = 0;
    for (std::size_t i = 0; i < s.dimension(); ++i)
        sum += T(s.occupation(i, mode)) * std::norm(state.amplitude(i));
    return sum;
}

template <typename T>
DensityMatrix<T> density_from(const MultiModeState<T>& state)
{
    const auto& v = state.amplitudes();
    return {state.space(), v * v.adjoint()};
}

template <typename T>
T purity(const DensityMatrix<T>& rho)
{
    // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
    return rho.elements().cwiseAbs2().sum();
}

namespace detail {

struct TraceSplit {
    ModeSpace kept;
    ModeSpace traced;
    std::vector<std::size_t> kept_index;   // full index -> kept-space index
    std::vector<std::size_t> traced_index; // full index -> traced-space index
    bool traced_empty = false;
};

inline TraceSplit split_modes(const ModeSpace& space, std::vector<std::size_t> keep)
{
    if (keep.empty())
        throw DimensionError("partial_trace needs a non-empty keep set");
    std::sort(keep.begin(), keep.end());
    if (std::adjacent_find(keep.begin(), keep.end()) != keep.end())
        throw DimensionError("duplicate mode in keep set");
    if (keep.back() >= space.mode_count())
        throw DimensionError("keep set refers to a mode outside the space");

    std::vector<std::size_t> drop;
    std::vector<int> kept_cut, drop_cut;
    for (std::size_t m = 0, k = 0; m < space.mode_count(); ++m) {
        if (k < keep.size() && keep[k] == m) {
            kept_cut.push_back(space.cutoff(m));
            ++k;
        } else {
            drop.push_back(m);
            drop_cut.push_back(space.cutoff(m));
        }
    }

    TraceSplit split;
    split.kept = ModeSpace(kept_cut);
    split.traced_empty = drop.empty();
    split.traced = drop.empty() ? ModeSpace({1}) : ModeSpace(drop_cut);
    split.kept_index.resize(space.dimension());
    split.traced_index.assign(space.dimension(), 0);
    for (std::size_t i = 0; i < space.dimension(); ++i) {
        std::size_t ki = 0;
        for (std::size_t k = 0; k < keep.size(); ++k)
            ki += static_cast<std::size_t>(space.occupation(i, keep[k])) * split.kept.stride(k);
        split.kept_index[i] = ki;
        std::size_t ti = 0;
        for (std::size_t d = 0; d < drop.size(); ++d)
            ti += static_cast<std::size_t>(space.occupation(i, drop[d])) * split.traced.stride(d);
        split.traced_index[i] = ti;
    }
    return split;
}

} // namespace detail

/// Reduced density matrix on the modes in `keep`. The result's modes are the
/// kept modes in ascending index order.
template <typename T>
DensityMatrix<T> partial_trace(const DensityMatrix<T>& rho, std::vector<std::size_t> keep)
{
    const ModeSpace& space = rho.space();
    auto split = detail::split_modes(space, std::move(keep));
    const auto dk = static_cast<Eigen::Index>(split.kept.dimension());
    const auto dt = split.traced_empty ? Eigen::Index(1) : static_cast<Eigen::Index>(split.traced.dimension());

    // full(k, t) = index in the original space
    MatrixX<Eigen::Index> full(dk, dt);
    for (std::size_t i = 0; i < space.dimension(); ++i)
        full(static_cast<Eigen::Index>(split.kept_index[i]), static_cast<Eigen::Index>(split.traced_index[i])) =
            static_cast<Eigen::Index>(i);

    typename DensityMatrix<T>::Matrix out = DensityMatrix<T>::Matrix::Zero(dk, dk);
    const auto& el = rho.elements();
    for (Eigen::Index t = 0; t < dt; ++t)
        for (Eigen::Index j = 0; j < dk; ++j)
            for (Eigen::Index i = 0; i < dk; ++i)
                out(i, j) += el(full(i, t), full(j, t));
    return {split.kept, std::move(out)};
}

/// Same as partial_trace(density_from(state), keep) without materializing the
/// full density matrix: reshape to kept x traced and form M M^dagger.
template <typename T>
DensityMatrix<T> partial_trace(const MultiModeState<T>& state, std::vector<std::size_t> keep)
{
    const ModeSpace& space = state.space();
    auto split = detail::split_modes(space, std::move(keep));
    const auto dk = static_cast<Eigen::Index>(split.kept.dimension());
    const auto dt = split.traced_empty ? Eigen::Index(1) : static_cast<Eigen::Index>(split.traced.dimension());
    MatrixX<Complex<T>> m = MatrixX<Complex<T>>::Zero(dk, dt);
    for (std::size_t i = 0; i < space.dimension(); ++i)
        m(static_cast<Eigen::Index>(split.kept_index[i]), static_cast<Eigen::Index>(split.traced_index[i])) =
            state.amplitude(i);
    typename DensityMatrix<T>::Matrix rho = m * m.adjoint();
    // Symmetrize away round-off so the Hermiticity invariant holds exactly.
    rho = (rho + rho.adjoint().eval()) / T(2);
    return {split.kept, std::move(rho)};
}

using StateD = MultiModeState<double>;
using DensityD = DensityMatrix<double>;

} // namespace brightdark
