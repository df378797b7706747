#pragma once

// Two coherently seeded downconversion sources feeding one output beam
// splitter. The signal photon lives in {|1,0>, |0,1>}; its coherence is set by
// the overlap of the two idler states (coherent vs single-photon-added
// coherent) and its phase by the pump and seed input phases.

#include "brightdark/fock.hpp"
#include "brightdark/types.hpp"

namespace brightdark {

namespace constants {
inline constexpr double kHbar = 1.054571817e-34;      // J s
inline constexpr double kEpsilon0 = 8.8541878128e-12; // F/m
inline constexpr double kLightSpeed = 299792458.0;    // m/s
} // namespace constants

// Weak-gain parameters above this break the first-order expansion.
inline constexpr double kMaxGain = 0.2;

/// Prepared-state parameters. Only |alpha_j| enters the model; the seed phase
/// is carried by phi_sd1/phi_sd2. Phases are stored unwrapped.
struct EnbsConfig {
    cdouble alpha1{10.0, 0.0};
    cdouble alpha2{10.0, 0.0};
    double r1 = 0.01;
    double r2 = 0.01;
    double phi_p1 = 0.0;
    double phi_p2 = 0.0;
    double phi_sd1 = 0.0;
    double phi_sd2 = 0.0;

    /// Equal seeding amplitude |alpha| on both sources, all phases zero.
    static EnbsConfig equal_seeding(double alpha, double r = 0.01);
};

/// Throws DomainError unless r1, r2 lie in (0, kMaxGain] and all fields are finite.
void validate(const EnbsConfig& cfg);

/// Reduced signal state in the post-selected single-photon block
/// {|1,0>, |0,1>}. `coherence` is the <1,0|rho|0,1> element.
struct SignalDensity {
    double rho11 = 0;
    double rho22 = 0;
    cdouble coherence{0, 0};

    double trace() const { return rho11 + rho22; }
    SignalDensity normalized() const;
    Eigen::Matrix2cd matrix() const;
};

struct PumpParams {
    double pump_power = 0;     // W
    double d33 = 0;            // m/V
    double n_p = 0;
    double n_s = 0;
    double n_i = 0;
    double omega_s = 0;        // rad/s
    double omega_i = 0;        // rad/s
    double mode_area = 0;      // m^2
    double length = 0;         // m
    double delta_k = 0;        // 1/m, any sign
    double phi_p = 0;          // rad
};

struct BlochState {
    double theta = 0; // [0, pi]
    double phi = 0;
};

struct DualityTriple {
    double predictability = 0;
    double visibility = 0;
    double purity_mu = 0;
};

/// sin(x)/x with the removable singularity filled in.
double sinc(double x);

/// Output phase that zeroes the seeded phase-matching mismatch.
double signal_output_phase(double phi_p, double phi_sd);

/// Coupling constant with d_eff = (2/pi) d33 and a sinc(delta_k L / 2)
/// phase-matching factor; its phase is the pump phase. No unit inference.
cdouble coupling_constant(const PumpParams& p);

/// Pump transit time n_p L / c.
double transit_time(const PumpParams& p);

/// |kappa| t / hbar, evaluated literally.
double gain_parameter(const PumpParams& p);

/// (phi_sd2 - phi_sd1) - (phi_p2 - phi_p1), unwrapped.
double prepared_phase(const EnbsConfig& cfg);

/// |<I1|I2>| = |a1||a2| / sqrt((1+|a1|^2)(1+|a2|^2)).
double idler_overlap(cdouble alpha1, cdouble alpha2);

/// Analytic reduced density with populations r_j^2 |alpha_j|^2.
SignalDensity reduced_density(const EnbsConfig& cfg);

BlochState bloch_angles(const EnbsConfig& cfg);

/// 2 sqrt(rho11 rho22) F with populations normalized to unit trace.
double visibility(const EnbsConfig& cfg);

/// 2 |coherence| / trace for any post-selected signal block.
double fringe_visibility(const SignalDensity& rho);

double nd_filter_visibility(double alpha_sq, double overlap_factor = 0.9);

/// (1 + V cos(detection_phase)) / 2.
double fringe_probability(double visibility, double detection_phase);

/// Bright-port probability at signal phase phi_s.
double detection_probability(const EnbsConfig& cfg, double phi_s);

/// Predictability, visibility and source purity of the trace-normalized block;
/// P^2 + V^2 = mu^2 holds identically.
DualityTriple duality_triple(const SignalDensity& rho);

/// First-order joint signal (x) idler state over modes [s1, s2, i1, i2], each
/// signal mode truncated at one photon and each idler at the coherent cutoff
/// plus one level of headroom.
StateD oracle_joint_state(const EnbsConfig& cfg);

/// Partial trace of oracle_joint_state over the idlers, restricted to the
/// single-photon signal block. Populations come out as r_j^2 (1 + |alpha_j|^2).
SignalDensity oracle_reduced_density(const EnbsConfig& cfg);

/// |<a1^dag alpha1 (x) alpha2 | alpha1 (x) a2^dag alpha2>| computed in Fock space.
double oracle_idler_overlap(cdouble alpha1, cdouble alpha2);

} // namespace brightdark
