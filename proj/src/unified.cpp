#include "brightdark/unified.hpp"

#include <cmath>
#include <limits>

#include "brightdark/fock.hpp"

namespace brightdark {

CollectiveSystem lambda_system(const LambdaSpec& spec)
{
    if (spec.omega1 < 0.0 || spec.omega2 < 0.0)
        throw DomainError("Rabi frequencies must be non-negative");
    const double omega = std::hypot(spec.omega1, spec.omega2);
    if (!(omega > 0.0))
        throw DomainError("Lambda system needs a non-zero total Rabi frequency");
    RowVectorXcd row(2);
    row << spec.omega1 / omega, std::polar(spec.omega2 / omega, spec.laser_phase_diff);
    auto coupling = CouplingOperator::single_row(row, "lambda");
    auto basis = decompose(coupling);
    return {std::move(coupling), std::move(basis)};
}

CollectiveSystem nslit_system(int n, std::span<const double> phases)
{
    if (n < 2)
        throw DomainError("N-slit system needs N >= 2");
    const auto un = static_cast<std::size_t>(n);
    if (phases.size() != un && phases.size() != un - 1)
        throw DomainError("N-slit system needs N or N-1 phases");
    const std::size_t shift = phases.size() == un ? 0 : 1;
    RowVectorXcd row(n);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (int j = 0; j < n; ++j) {
        const double phi = (shift == 1 && j == 0) ? 0.0 : phases[static_cast<std::size_t>(j) - shift];
        row(j) = std::polar(norm, phi);
    }
    auto coupling = CouplingOperator::single_row(row, "n-slit");
    auto basis = decompose(coupling);
    return {std::move(coupling), std::move(basis)};
}

std::vector<double> linspace(double lo, double hi, int points)
{
    if (points < 1)
        throw DomainError("linspace needs at least one point");
    std::vector<double> out(static_cast<std::size_t>(points));
    if (points == 1) {
        out[0] = lo;
        return out;
    }
    const double step = (hi - lo) / (points - 1);
    for (int i = 0; i < points; ++i)
        out[static_cast<std::size_t>(i)] = lo + step * i;
    return out;
}

double dirichlet_value(int sources, double delta)
{
    if (sources < 1)
        throw DomainError("Dirichlet profile needs at least one source");
    const double den = std::sin(delta / 2.0);
    if (std::abs(den) < 1e-9)
        return 1.0;
    const double ratio = std::sin(sources * delta / 2.0) / den;
    return ratio * ratio / (double(sources) * sources);
}

std::vector<Sample> dirichlet_profile(const DirichletSpec& spec)
{
    if (spec.sources < 2)
        throw DomainError("Dirichlet profile needs M >= 2");
    std::vector<Sample> out;
    out.reserve(spec.deltas.size());
    for (double d : spec.deltas)
        out.push_back({d, dirichlet_value(spec.sources, d)});
    return out;
}

void validate(const SlitSpec& spec)
{
    if (spec.segments < 16)
        throw DomainError("slit discretization needs at least 16 segments");
    if (!(spec.width > 0.0) || !(spec.wavenumber > 0.0))
        throw DomainError("slit width and wavenumber must be positive");
    for (double a : spec.angles)
        if (!(std::abs(a) <= kPi / 2))
            throw DomainError("slit angles must lie in [-pi/2, pi/2]");
}

double fraunhofer_beta(double wavenumber, double width, double theta)
{
    return 0.5 * wavenumber * width * std::sin(theta);
}

RowVectorXcd slit_detector_row(const SlitSpec& spec, double theta)
{
    const int k = spec.segments;
    const double norm = 1.0 / std::sqrt(static_cast<double>(k));
    const double q = spec.wavenumber * std::sin(theta);
    RowVectorXcd row(k);
    for (int m = 0; m < k; ++m) {
        const double x = (m + 0.5) * spec.width / k;
        row(m) = std::polar(norm, q * x);
    }
    return row;
}

std::vector<Sample> slit_bright_occupation(const SlitSpec& spec)
{
    validate(spec);
    const VectorXcd uniform = VectorXcd::Constant(spec.segments, 1.0 / std::sqrt(double(spec.segments)));
    std::vector<Sample> out;
    out.reserve(spec.angles.size());
    for (double theta : spec.angles) {
        const cdouble c0 = (slit_detector_row(spec, theta) * uniform)(0);
        out.push_back({theta, std::norm(c0)});
    }
    return out;
}

ModeBasis slit_dark_basis(const SlitSpec& spec, double theta)
{
    validate(spec);
    const int k = spec.segments;
    const RowVectorXcd row = slit_detector_row(spec, theta);

    // Column n: conj(row) times the Fourier factor e^{i k_n x_m}, k_n = 2 pi n / b.
    MatrixXcd modes(k, k);
    for (int n = 0; n < k; ++n) {
        for (int m = 0; m < k; ++m) {
            const double fourier = kTwoPi * n * (m + 0.5) / k;
            modes(m, n) = std::conj(row(m)) * std::polar(1.0, fourier);
        }
        fix_global_phase(modes.col(n));
    }

    ModeBasis basis;
    basis.bright = modes.leftCols(1);
    basis.dark = modes.rightCols(k - 1);
    basis.residual = dark_residual(CouplingOperator::single_row(row, "slit"), basis.dark);
    return basis;
}

namespace {

double g2_from_state(const StateD& psi, cdouble c0)
{
    const StateD once = apply_annihilate(psi, 0);
    const StateD twice = apply_annihilate(once, 0);
    const double weight = std::norm(c0);
    const double single = weight * once.amplitudes().squaredNorm();
    const double pair = weight * weight * twice.amplitudes().squaredNorm();
    if (single == 0.0)
        return std::numeric_limits<double>::quiet_NaN();
    return pair / (single * single);
}

StateD supermode_state(const SupermodeInput& input)
{
    if (const auto* f = std::get_if<FockInput>(&input)) {
        if (f->photons < 1)
            throw DomainError("g2 is undefined for zero photons");
        return fock_state<double>(f->photons, std::max(f->photons, 1));
    }
    const cdouble alpha = std::get<CoherentInput>(input).alpha;
    if (std::abs(alpha) == 0.0)
        throw DomainError("g2 is undefined for the vacuum");
    return coherent_state(alpha, coherent_cutoff(alpha));
}

} // namespace

std::vector<Sample> g2_profile(const SupermodeInput& input, const SlitSpec& spec)
{
    validate(spec);
    const StateD psi = supermode_state(input);
    const VectorXcd uniform = VectorXcd::Constant(spec.segments, 1.0 / std::sqrt(double(spec.segments)));
    std::vector<Sample> out;
    out.reserve(spec.angles.size());
    for (double theta : spec.angles) {
        const cdouble c0 = (slit_detector_row(spec, theta) * uniform)(0);
        out.push_back({theta, g2_from_state(psi, c0)});
    }
    return out;
}

} // namespace brightdark
