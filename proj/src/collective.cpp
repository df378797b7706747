#include "brightdark/collective.hpp"

#include <cmath>

#include <Eigen/SVD>

namespace brightdark {

CouplingOperator::CouplingOperator(MatrixXcd rows, std::string label)
    : rows_(std::move(rows)), label_(std::move(label))
{
    if (rows_.rows() < 1)
        throw DimensionError("coupling operator needs at least one row");
    if (rows_.cols() < 2)
        throw DimensionError("coupling operator needs a mode space of dimension >= 2");
    if (!rows_.allFinite())
        throw DomainError("coupling operator entries must be finite");
}

CouplingOperator CouplingOperator::single_row(const RowVectorXcd& row, std::string label)
{
    return CouplingOperator(MatrixXcd(row), std::move(label));
}

VectorXcd CouplingOperator::apply(const VectorXcd& state) const
{
    if (state.size() != rows_.cols())
        throw DimensionError("state dimension does not match coupling operator");
    return rows_ * state;
}

void fix_global_phase(Eigen::Ref<VectorXcd> v, double tol)
{
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double mag = std::abs(v(i));
        if (mag > tol) {
            v *= std::conj(v(i)) / mag;
            v(i) = mag;
            return;
        }
    }
}

ModeBasis decompose(const CouplingOperator& op)
{
    const MatrixXcd& o = op.rows();
    const Eigen::Index d = o.cols();

    Eigen::JacobiSVD<MatrixXcd> svd(o, Eigen::ComputeFullV);
    const VectorXd& sigma = svd.singularValues();
    const double smax = sigma.size() > 0 ? sigma(0) : 0.0;

    Eigen::Index rank = 0;
    if (smax > 0)
        for (Eigen::Index i = 0; i < sigma.size(); ++i)
            if (sigma(i) > kKernelThreshold * smax)
                ++rank;

    // O = U S V^H: the first `rank` columns of V span the conjugated row
    // space, the remaining d - rank columns span the kernel.
    const MatrixXcd& v = svd.matrixV();
    ModeBasis basis;
    basis.bright = v.leftCols(rank);
    basis.dark = v.rightCols(d - rank);
    basis.rank_zero = rank == 0;
    for (Eigen::Index j = 0; j < basis.bright.cols(); ++j)
        fix_global_phase(basis.bright.col(j));
    for (Eigen::Index j = 0; j < basis.dark.cols(); ++j)
        fix_global_phase(basis.dark.col(j));
    basis.residual = dark_residual(op, basis.dark);
    return basis;
}

double dark_residual(const CouplingOperator& op, const MatrixXcd& vectors)
{
    if (vectors.cols() == 0)
        return 0.0;
    return (op.rows() * vectors).colwise().norm().maxCoeff();
}

namespace {

void require_normalized(const VectorXcd& state)
{
    if (std::abs(state.norm() - 1.0) > 1e-9)
        throw DomainError("state must be normalized within 1e-9");
}

} // namespace

double detection_probability(const VectorXcd& state, const CouplingOperator& op)
{
    require_normalized(state);
    if (state.size() != op.mode_count())
        throw DimensionError("state dimension does not match coupling operator");
    if (op.channel_count() == 1) {
        const double row_norm2 = op.rows().row(0).squaredNorm();
        if (row_norm2 == 0.0)
            return 0.0;
        return std::norm((op.rows() * state)(0)) / row_norm2;
    }
    return bright_population(state, decompose(op));
}

double bright_population(const VectorXcd& state, const ModeBasis& basis)
{
    require_normalized(state);
    if (state.size() != basis.dimension())
        throw DimensionError("state dimension does not match mode basis");
    return (basis.bright.adjoint() * state).squaredNorm();
}

double dark_population(const VectorXcd& state, const ModeBasis& basis)
{
    require_normalized(state);
    if (state.size() != basis.dimension())
        throw DimensionError("state dimension does not match mode basis");
    return (basis.dark.adjoint() * state).squaredNorm();
}

CouplingOperator two_mode_detector(double phi_s)
{
    RowVectorXcd row(2);
    row << 1.0, std::polar(1.0, phi_s);
    return CouplingOperator::single_row(row / std::sqrt(2.0), "two-mode detector");
}

VectorXcd bloch_state(double theta, double phi)
{
    VectorXcd v(2);
    v << std::cos(theta / 2), std::polar(std::sin(theta / 2), phi);
    return v;
}

} // namespace brightdark
