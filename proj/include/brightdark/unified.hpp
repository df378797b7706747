#pragma once

// The four bright/dark systems expressed on one CouplingOperator/ModeBasis
// skeleton: the atomic Lambda scheme, N discrete paths, M phase-stepped
// sources (Dirichlet fringes) and a slit discretized into K segments.

#include <span>
#include <variant>
#include <vector>

#include "brightdark/collective.hpp"

namespace brightdark {

struct CollectiveSystem {
    CouplingOperator coupling;
    ModeBasis basis;
};

struct LambdaSpec {
    double omega1 = 1.0; // rad/s
    double omega2 = 1.0; // rad/s
    double laser_phase_diff = 0.0;
};

/// Row (Omega1, Omega2 e^{i dphi}) / Omega over {|g1>, |g2>}.
CollectiveSystem lambda_system(const LambdaSpec& spec);

/// Detector row (1, e^{i phi_2}, ..., e^{i phi_N}) / sqrt(N). `phases` holds
/// either the N-1 relative phases phi_2..phi_N or all N phases.
CollectiveSystem nslit_system(int n, std::span<const double> phases);

struct Sample {
    double x = 0;
    double y = 0;
};

/// `points` evenly spaced values in [lo, hi].
std::vector<double> linspace(double lo, double hi, int points);

struct DirichletSpec {
    int sources = 2;
    std::vector<double> deltas;
};

/// |sin(M d/2) / sin(d/2)|^2 / M^2, equal to 1 at d = 2 pi m.
double dirichlet_value(int sources, double delta);

std::vector<Sample> dirichlet_profile(const DirichletSpec& spec);

struct SlitSpec {
    double width = 10e-6;          // b, m
    double wavenumber = 7.786e6;   // k, 1/m
    int segments = 1024;           // K
    std::vector<double> angles;    // rad
};

void validate(const SlitSpec& spec);

/// (k b / 2) sin(theta).
double fraunhofer_beta(double wavenumber, double width, double theta);

/// e^{i k x_m sin(theta)} / sqrt(K) at segment midpoints x_m = (m + 1/2) b / K.
RowVectorXcd slit_detector_row(const SlitSpec& spec, double theta);

/// |c0(theta)|^2 for a photon spread uniformly over the K segments.
std::vector<Sample> slit_bright_occupation(const SlitSpec& spec);

/// Detector-oriented Fourier modes over the K segments: column 0 of `bright`
/// is the compensated mode, the K-1 others are dark.
ModeBasis slit_dark_basis(const SlitSpec& spec, double theta);

struct FockInput {
    int photons = 1;
};
struct CoherentInput {
    cdouble alpha{1.0, 0.0};
};
using SupermodeInput = std::variant<FockInput, CoherentInput>;

/// Normalized second-order correlation at each angle for light occupying only
/// the uniform slit supermode. The detector sees c0(theta) times that mode's
/// annihilator; dark modes are vacuum. NaN where c0 vanishes exactly.
std::vector<Sample> g2_profile(const SupermodeInput& input, const SlitSpec& spec);

} // namespace brightdark
