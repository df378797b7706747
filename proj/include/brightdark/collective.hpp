#pragma once

// Bright/dark decomposition of a detector-field coupling operator in the
// single-excitation picture. A coupling with m detection channels over d modes
// is an m x d matrix O; applying it to a mode-amplitude vector c gives the
// channel amplitudes O c. Dark vectors span ker(O), bright vectors span the
// orthogonal complement (the conjugated row space).

#include <string>

#include "brightdark/types.hpp"

namespace brightdark {

// Singular values below this fraction of the largest count as zero.
inline constexpr double kKernelThreshold = 1e-10;

class CouplingOperator {
public:
    CouplingOperator(MatrixXcd rows, std::string label = {});

    static CouplingOperator single_row(const RowVectorXcd& row, std::string label = {});

    const MatrixXcd& rows() const { return rows_; }
    const std::string& label() const { return label_; }
    Eigen::Index mode_count() const { return rows_.cols(); }
    Eigen::Index channel_count() const { return rows_.rows(); }

    VectorXcd apply(const VectorXcd& state) const;

private:
    MatrixXcd rows_;
    std::string label_;
};

struct ModeBasis {
    MatrixXcd bright;        // columns: orthonormal basis of the row space
    MatrixXcd dark;          // columns: orthonormal basis of the kernel
    double residual = 0;     // max over dark columns of ||O v||
    bool rank_zero = false;  // set when O has no bright direction at all

    Eigen::Index dimension() const { return bright.rows(); }
    Eigen::Index bright_count() const { return bright.cols(); }
    Eigen::Index dark_count() const { return dark.cols(); }
};

/// Rotates `v` so that its first component with magnitude above `tol` is real
/// and positive.
void fix_global_phase(Eigen::Ref<VectorXcd> v, double tol = 1e-12);

/// Bright/dark split by SVD with relative threshold kKernelThreshold.
ModeBasis decompose(const CouplingOperator& op);

/// Largest ||O v|| over the columns of `vectors`.
double dark_residual(const CouplingOperator& op, const MatrixXcd& vectors);

/// Bright-subspace population of a normalized single-excitation state. For a
/// single detector row r this is |r . state|^2 / |r|^2.
double detection_probability(const VectorXcd& state, const CouplingOperator& op);

/// Population of `state` in the dark columns of `basis`.
double dark_population(const VectorXcd& state, const ModeBasis& basis);

/// Population of `state` in the bright columns of `basis`.
double bright_population(const VectorXcd& state, const ModeBasis& basis);

/// Two-mode detector row (1, e^{i phi_s}) / sqrt(2).
CouplingOperator two_mode_detector(double phi_s);

/// cos(theta/2)|1,0> + e^{i phi} sin(theta/2)|0,1> as a two-component vector.
VectorXcd bloch_state(double theta, double phi);

} // namespace brightdark
