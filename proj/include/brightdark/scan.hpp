#pragma once

// Simulated fringe-scan experiments: phase scans of the two-source
// interferometer, shot-noise emulation, fixed-period sinusoid fitting,
// Bloch-equator mapping, high-flux scaling, photon budget and the RF comb
// spectrum of a pulse train.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "brightdark/enbs.hpp"

namespace brightdark {

/// SplitMix64 (Steele, Lea, Flood 2014): state += 0x9E3779B97F4A7C15, then
/// z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9; z = (z ^ (z >> 27)) *
/// 0x94D049BB133111EB; z ^= z >> 31. Uniform doubles take the top 53 bits.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next();
    double uniform(); // [0, 1)
    double normal();  // Box-Muller, one variate per call

    /// Knuth multiplication below mean 10, Hormann's PTRS above.
    std::int64_t poisson(double mean);

    /// Independent stream for item `index`: seeded with
    /// mix(seed ^ mix(index + 1)) so item streams do not depend on evaluation
    /// order.
    static SplitMix64 stream(std::uint64_t seed, std::uint64_t index);

    static std::uint64_t mix(std::uint64_t z);

private:
    std::uint64_t state_;
};

enum class ScanTarget { pump, seed, signal };

std::string to_string(ScanTarget t);
ScanTarget parse_scan_target(const std::string& s);

/// +1 when the detection phase grows with the scanned phase, -1 for the pump.
int slope_sign(ScanTarget t);

struct NoiseSpec {
    double frames_mean_counts = 30000.0; // per-period mean counts per frame
    std::uint64_t rng_seed = 0;
    double background = 0.0;             // additive mean counts per point
};

struct ScanSpec {
    ScanTarget target = ScanTarget::signal;
    double start = 0.0;
    double stop = kTwoPi;
    int steps = 100;
    EnbsConfig base{};
    double phi_s0 = 0.0;
    std::optional<NoiseSpec> noise;
};

void validate(const ScanSpec& spec);

struct FringePoint {
    double phase = 0;
    double p_bright = 0;
    std::optional<std::int64_t> counts;
    std::optional<double> expected_counts;
};

struct FringeDataset {
    std::vector<FringePoint> points;
    ScanSpec meta;
    std::optional<double> n_bar; // set by high_flux
};

struct FitResult {
    double visibility = 0;
    double delta = 0;  // rad, in (-pi, pi]
    double offset = 0; // A in A (1 + V cos(x + delta))
    double rms_residual = 0;
};

/// Evaluates the bright-port probability at `steps` evenly spaced phases in
/// [start, stop]; the scanned phase is added to phi_p2, phi_sd2 or phi_s0.
/// With noise, counts ~ Poisson(2 N P_B + background), one independent stream
/// per point index.
FringeDataset run_scan(const ScanSpec& spec);

/// Least-squares fit of A + c cos x + s sin x (period fixed at 2 pi) to the
/// counts, the expected counts or p_bright, whichever is most observational.
FitResult fit_fringe(const FringeDataset& data);

struct ScanFit {
    ScanTarget target;
    FitResult fit;
};

struct ThreeScanReport {
    std::vector<ScanFit> scans; // pump, seed, signal
    double max_visibility_spread = 0;
    double max_rms_residual = 0;
    bool pump_seed_opposite = false; // fringe slopes opposite at matched origin
    bool equivalent = false;
};

ThreeScanReport three_scan_equivalence(const EnbsConfig& base, int steps, double tolerance = 1e-9);

struct PlanePoint {
    double x = 0;
    double y = 0;
};

/// Places each point at its detection phase slope * (x + delta) on a circle.
std::vector<PlanePoint> bloch_map(const FringeDataset& data, const FitResult& fit, double ring_radius = 1.0);

/// Expected detected counts n_bar * P_B per point.
FringeDataset high_flux(const FringeDataset& data, double n_bar);

struct PhotonBudget {
    std::int64_t bins = 0;
    double expected_counts = 0;
};

PhotonBudget photon_budget(double occupancy, double t_int, double f_rep);

/// 2 pi delta_x / wavelength.
double phase_from_path(double delta_x, double wavelength);

struct CombSpec {
    double f_rep = 250e6;
    int n_pulses = 64;
    int samples_per_period = 32;
    double pulse_width = 100e-12; // Gaussian 1/e half width, s
    double carrier_phase_noise_rms = 0.0;
    double amplitude = 1.0;
    std::uint64_t rng_seed = 0;
};

void validate(const CombSpec& spec);

struct SpectrumLine {
    double frequency = 0;
    double power_db = 0;
    bool is_peak = false;
};

inline constexpr double kSpectrumFloorDb = -300.0;

/// One-sided power spectrum (DC to Nyquist) of a train of Gaussian pulses with
/// per-pulse carrier phases drawn from N(0, rms^2).
std::vector<SpectrumLine> comb_spectrum(const CombSpec& spec);

/// Mean power at the bins nearest k f_rep (k = 1..harmonics) minus the median
/// power over all bins, in dB.
double peak_to_floor_db(const std::vector<SpectrumLine>& spectrum, double f_rep, int harmonics = 4);

} // namespace brightdark
