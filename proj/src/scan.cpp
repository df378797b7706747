#include "brightdark/scan.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>
#include <unsupported/Eigen/FFT>

namespace brightdark {

// ---------------------------------------------------------------------------
// RNG

std::uint64_t SplitMix64::mix(std::uint64_t z)
{
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t SplitMix64::next()
{
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
}

double SplitMix64::uniform()
{
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

double SplitMix64::normal()
{
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

std::int64_t SplitMix64::poisson(double mean)
{
    if (!(mean >= 0.0) || !std::isfinite(mean))
        throw DomainError("Poisson mean must be finite and non-negative");
    if (mean == 0.0)
        return 0;
    if (mean < 10.0) {
        const double limit = std::exp(-mean);
        std::int64_t k = 0;
        double prod = uniform();
        while (prod > limit) {
            ++k;
            prod *= uniform();
        }
        return k;
    }
    // PTRS: transformed rejection with squeeze (Hormann 1993).
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
        const double u = uniform() - 0.5;
        const double v = uniform();
        const double us = 0.5 - std::abs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr)
            return static_cast<std::int64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us))
            continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            -mean + k * loglam - std::lgamma(k + 1.0))
            return static_cast<std::int64_t>(k);
    }
}

SplitMix64 SplitMix64::stream(std::uint64_t seed, std::uint64_t index)
{
    return SplitMix64(mix(seed ^ mix(index + 1)));
}

// ---------------------------------------------------------------------------
// Scans

std::string to_string(ScanTarget t)
{
    switch (t) {
    case ScanTarget::pump:
        return "pump";
    case ScanTarget::seed:
        return "seed";
    case ScanTarget::signal:
        return "signal";
    }
    return "signal";
}

ScanTarget parse_scan_target(const std::string& s)
{
    if (s == "pump")
        return ScanTarget::pump;
    if (s == "seed")
        return ScanTarget::seed;
    if (s == "signal")
        return ScanTarget::signal;
    throw DomainError("unknown scan target '" + s + "' (expected pump, seed or signal)");
}

int slope_sign(ScanTarget t) { return t == ScanTarget::pump ? -1 : 1; }

void validate(const ScanSpec& spec)
{
    if (spec.steps < 8)
        throw DomainError("scan needs at least 8 steps");
    if (!(spec.stop > spec.start) || !std::isfinite(spec.start) || !std::isfinite(spec.stop))
        throw DomainError("scan range must satisfy stop > start");
    validate(spec.base);
    if (spec.noise) {
        if (!(spec.noise->frames_mean_counts > 0.0) || !std::isfinite(spec.noise->frames_mean_counts))
            throw DomainError("frames_mean_counts must be positive");
        if (!(spec.noise->background >= 0.0))
            throw DomainError("background must be non-negative");
    }
}

FringeDataset run_scan(const ScanSpec& spec)
{
    validate(spec);
    FringeDataset data;
    data.meta = spec;
    data.points.reserve(static_cast<std::size_t>(spec.steps));
    const double step = (spec.stop - spec.start) / (spec.steps - 1);
    for (int k = 0; k < spec.steps; ++k) {
        const double x = spec.start + step * k;
        EnbsConfig cfg = spec.base;
        double phi_s = spec.phi_s0;
        switch (spec.target) {
        case ScanTarget::pump:
            cfg.phi_p2 += x;
            break;
        case ScanTarget::seed:
            cfg.phi_sd2 += x;
            break;
        case ScanTarget::signal:
            phi_s += x;
            break;
        }
        FringePoint pt;
        pt.phase = x;
        pt.p_bright = detection_probability(cfg, phi_s);
        if (spec.noise) {
            auto rng = SplitMix64::stream(spec.noise->rng_seed, static_cast<std::uint64_t>(k));
            pt.counts = rng.poisson(2.0 * spec.noise->frames_mean_counts * pt.p_bright + spec.noise->background);
        }
        data.points.push_back(pt);
    }
    return data;
}

FitResult fit_fringe(const FringeDataset& data)
{
    const auto n = static_cast<Eigen::Index>(data.points.size());
    if (n < 8)
        throw DomainError("fringe fit needs at least 8 points");
    const auto [lo, hi] = std::minmax_element(data.points.begin(), data.points.end(),
                                              [](const FringePoint& a, const FringePoint& b) { return a.phase < b.phase; });
    if (hi->phase - lo->phase < kPi)
        throw DomainError("fringe fit needs a scan spanning at least half a period");

    const bool use_counts = std::all_of(data.points.begin(), data.points.end(), [](const auto& p) { return p.counts.has_value(); });
    const bool use_expected =
        !use_counts && std::all_of(data.points.begin(), data.points.end(), [](const auto& p) { return p.expected_counts.has_value(); });

    Eigen::MatrixXd design(n, 3);
    VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const FringePoint& p = data.points[static_cast<std::size_t>(i)];
        design(i, 0) = 1.0;
        design(i, 1) = std::cos(p.phase);
        design(i, 2) = std::sin(p.phase);
        y(i) = use_counts ? static_cast<double>(*p.counts) : use_expected ? *p.expected_counts : p.p_bright;
    }
    const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(y);
    const double a = coef(0);
    if (!(a > 0.0))
        throw DomainError("fringe fit produced a non-positive mean level");

    // c cos x + s sin x = B cos(x + delta) with c = B cos delta, s = -B sin delta.
    const double amp = std::hypot(coef(1), coef(2));
    FitResult fit;
    fit.offset = a;
    fit.visibility = amp / a;
    fit.delta = wrap_phase(std::atan2(-coef(2), coef(1)));
    fit.rms_residual = std::sqrt((design * coef - y).squaredNorm() / static_cast<double>(n));
    return fit;
}

ThreeScanReport three_scan_equivalence(const EnbsConfig& base, int steps, double tolerance)
{
    ThreeScanReport report;
    std::vector<FringeDataset> sets;
    for (ScanTarget t : {ScanTarget::pump, ScanTarget::seed, ScanTarget::signal}) {
        ScanSpec spec;
        spec.target = t;
        spec.steps = steps;
        spec.base = base;
        sets.push_back(run_scan(spec));
        report.scans.push_back({t, fit_fringe(sets.back())});
    }

    double vmin = report.scans.front().fit.visibility;
    double vmax = vmin;
    for (const auto& s : report.scans) {
        vmin = std::min(vmin, s.fit.visibility);
        vmax = std::max(vmax, s.fit.visibility);
        report.max_rms_residual = std::max(report.max_rms_residual, s.fit.rms_residual);
    }
    report.max_visibility_spread = vmax - vmin;

    // Pump fringe at +x equals seed fringe at -x (== 2 pi - x on the grid).
    const auto& pump = sets[0].points;
    const auto& seed = sets[1].points;
    double mirror_err = 0;
    for (std::size_t k = 0; k < pump.size(); ++k)
        mirror_err = std::max(mirror_err, std::abs(pump[k].p_bright - seed[pump.size() - 1 - k].p_bright));
    report.pump_seed_opposite = mirror_err <= tolerance;

    report.equivalent =
        report.max_visibility_spread <= tolerance && report.max_rms_residual <= tolerance && report.pump_seed_opposite;
    return report;
}

std::vector<PlanePoint> bloch_map(const FringeDataset& data, const FitResult& fit, double ring_radius)
{
    if (!(ring_radius > 0.0))
        throw DomainError("ring radius must be positive");
    const int slope = slope_sign(data.meta.target);
    std::vector<PlanePoint> out;
    out.reserve(data.points.size());
    for (const auto& p : data.points) {
        const double angle = slope * (p.phase + fit.delta);
        out.push_back({ring_radius * std::cos(angle), ring_radius * std::sin(angle)});
    }
    return out;
}

FringeDataset high_flux(const FringeDataset& data, double n_bar)
{
    if (!(n_bar >= 0.0) || !std::isfinite(n_bar))
        throw DomainError("n_bar must be finite and non-negative");
    FringeDataset out = data;
    out.n_bar = n_bar;
    for (auto& p : out.points) {
        p.counts.reset();
        p.expected_counts = n_bar * p.p_bright;
    }
    return out;
}

PhotonBudget photon_budget(double occupancy, double t_int, double f_rep)
{
    if (!(occupancy >= 0.0) || !(t_int > 0.0) || !(f_rep > 0.0))
        throw DomainError("photon budget needs occupancy >= 0, t_int > 0 and f_rep > 0");
    PhotonBudget b;
    b.bins = std::llround(t_int * f_rep);
    b.expected_counts = occupancy * static_cast<double>(b.bins);
    return b;
}

double phase_from_path(double delta_x, double wavelength)
{
    if (!(wavelength > 0.0))
        throw DomainError("wavelength must be positive");
    return kTwoPi * delta_x / wavelength;
}

// ---------------------------------------------------------------------------
// Comb spectrum

void validate(const CombSpec& spec)
{
    if (spec.samples_per_period < 8)
        throw DomainError("comb synthesis needs at least 8 samples per period");
    if (spec.n_pulses < 16)
        throw DomainError("comb synthesis needs at least 16 pulses");
    if (!(spec.f_rep > 0.0) || !(spec.pulse_width > 0.0))
        throw DomainError("f_rep and pulse_width must be positive");
    if (!(spec.carrier_phase_noise_rms >= 0.0))
        throw DomainError("phase noise rms must be non-negative");
}

std::vector<SpectrumLine> comb_spectrum(const CombSpec& spec)
{
    validate(spec);
    const int spp = spec.samples_per_period;
    const int np = spec.n_pulses;
    const int n = spp * np;
    const double period = 1.0 / spec.f_rep;
    const double dt = period / spp;

    std::vector<cdouble> carrier(static_cast<std::size_t>(np));
    for (int k = 0; k < np; ++k) {
        auto rng = SplitMix64::stream(spec.rng_seed, static_cast<std::uint64_t>(k));
        carrier[static_cast<std::size_t>(k)] = std::polar(spec.amplitude, spec.carrier_phase_noise_rms * rng.normal());
    }

    // Each sample sees the pulse of its own period and both neighbours,
    // wrapped so the record is exactly periodic.
    std::vector<cdouble> field(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const int k = i / spp;
        const double t = (i % spp + 0.5) * dt - 0.5 * period;
        cdouble sum = 0;
        for (int dk = -1; dk <= 1; ++dk) {
            const double tau = (t - dk * period) / spec.pulse_width;
            sum += carrier[static_cast<std::size_t>((k + dk + np) % np)] * std::exp(-tau * tau);
        }
        field[static_cast<std::size_t>(i)] = sum;
    }

    Eigen::FFT<double> fft;
    std::vector<cdouble> freq;
    fft.fwd(freq, field);

    const int half = n / 2;
    const double df = spec.f_rep / np;
    std::vector<SpectrumLine> out(static_cast<std::size_t>(half + 1));
    for (int j = 0; j <= half; ++j) {
        const double p = std::norm(freq[static_cast<std::size_t>(j)]) / (double(n) * n);
        out[static_cast<std::size_t>(j)] = {j * df, p > 1e-30 ? 10.0 * std::log10(p) : kSpectrumFloorDb, false};
    }

    std::vector<double> sorted;
    sorted.reserve(out.size());
    for (const auto& l : out)
        sorted.push_back(l.power_db);
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double top = *std::max_element(sorted.begin(), sorted.end());

    for (std::size_t j = 0; j < out.size(); ++j) {
        const double v = out[j].power_db;
        const bool left = j == 0 || v > out[j - 1].power_db;
        const bool right = j + 1 == out.size() || v > out[j + 1].power_db;
        out[j].is_peak = left && right && v >= median + 10.0 && v >= top - 60.0;
    }
    return out;
}

double peak_to_floor_db(const std::vector<SpectrumLine>& spectrum, double f_rep, int harmonics)
{
    if (spectrum.size() < 2)
        throw DomainError("spectrum too short");
    const double df = spectrum[1].frequency - spectrum[0].frequency;
    double peak = 0;
    int used = 0;
    for (int k = 1; k <= harmonics; ++k) {
        const auto j = static_cast<std::size_t>(std::llround(k * f_rep / df));
        if (j >= spectrum.size())
            break;
        peak += spectrum[j].power_db;
        ++used;
    }
    if (used == 0)
        throw DomainError("no comb harmonic below Nyquist");
    std::vector<double> all;
    for (const auto& l : spectrum)
        all.push_back(l.power_db);
    std::nth_element(all.begin(), all.begin() + all.size() / 2, all.end());
    return peak / used - all[all.size() / 2];
}

} // namespace brightdark
