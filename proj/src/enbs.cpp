#include "brightdark/enbs.hpp"

#include <cmath>

namespace brightdark {

EnbsConfig EnbsConfig::equal_seeding(double alpha, double r)
{
    EnbsConfig cfg;
    cfg.alpha1 = cfg.alpha2 = cdouble(alpha, 0.0);
    cfg.r1 = cfg.r2 = r;
    return cfg;
}

void validate(const EnbsConfig& cfg)
{
    auto gain_ok = [](double r) { return std::isfinite(r) && r > 0.0 && r <= kMaxGain; };
    if (!gain_ok(cfg.r1) || !gain_ok(cfg.r2))
        throw DomainError("gain parameters must lie in (0, 0.2] for the first-order model");
    const double fields[] = {std::abs(cfg.alpha1), std::abs(cfg.alpha2), cfg.phi_p1, cfg.phi_p2, cfg.phi_sd1, cfg.phi_sd2};
    for (double f : fields)
        if (!std::isfinite(f))
            throw DomainError("EnbsConfig fields must be finite");
}

SignalDensity SignalDensity::normalized() const
{
    const double t = trace();
    if (!(t > 0.0))
        throw DomainError("signal block has zero trace; nothing to normalize");
    return {rho11 / t, rho22 / t, coherence / t};
}

Eigen::Matrix2cd SignalDensity::matrix() const
{
    Eigen::Matrix2cd m;
    m << rho11, coherence, std::conj(coherence), rho22;
    return m;
}

double sinc(double x)
{
    if (std::abs(x) < 1e-8)
        return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

double signal_output_phase(double phi_p, double phi_sd) { return phi_p - phi_sd; }

namespace {

void require_positive(double v, const char* name)
{
    if (!(v > 0.0) || !std::isfinite(v))
        throw DomainError(std::string("pump parameter '") + name + "' must be positive and finite");
}

void validate(const PumpParams& p)
{
    require_positive(p.pump_power, "pump_power");
    require_positive(p.d33, "d33");
    require_positive(p.n_p, "n_p");
    require_positive(p.n_s, "n_s");
    require_positive(p.n_i, "n_i");
    require_positive(p.omega_s, "omega_s");
    require_positive(p.omega_i, "omega_i");
    require_positive(p.mode_area, "mode_area");
    require_positive(p.length, "length");
    if (!std::isfinite(p.delta_k) || !std::isfinite(p.phi_p))
        throw DomainError("delta_k and phi_p must be finite");
}

} // namespace

cdouble coupling_constant(const PumpParams& p)
{
    using namespace constants;
    validate(p);
    const double d_eff = (2.0 / kPi) * p.d33;
    const double root = std::sqrt(p.pump_power * p.omega_s * p.omega_i /
                                  (kEpsilon0 * p.n_p * p.n_s * p.n_i * kLightSpeed * p.mode_area));
    const double magnitude = kHbar * d_eff / p.n_p * root * sinc(p.delta_k * p.length / 2.0);
    return std::polar(1.0, p.phi_p) * magnitude;
}

double transit_time(const PumpParams& p)
{
    validate(p);
    return p.n_p * p.length / constants::kLightSpeed;
}

double gain_parameter(const PumpParams& p)
{
    return std::abs(coupling_constant(p)) * transit_time(p) / constants::kHbar;
}

double prepared_phase(const EnbsConfig& cfg)
{
    return (cfg.phi_sd2 - cfg.phi_sd1) - (cfg.phi_p2 - cfg.phi_p1);
}

double idler_overlap(cdouble alpha1, cdouble alpha2)
{
    const double a1 = std::norm(alpha1);
    const double a2 = std::norm(alpha2);
    return std::sqrt(a1 * a2 / ((1.0 + a1) * (1.0 + a2)));
}

SignalDensity reduced_density(const EnbsConfig& cfg)
{
    validate(cfg);
    SignalDensity rho;
    rho.rho11 = cfg.r1 * cfg.r1 * std::norm(cfg.alpha1);
    rho.rho22 = cfg.r2 * cfg.r2 * std::norm(cfg.alpha2);
    const double f = idler_overlap(cfg.alpha1, cfg.alpha2);
    rho.coherence = std::polar(std::sqrt(rho.rho11 * rho.rho22) * f, -prepared_phase(cfg));
    return rho;
}

BlochState bloch_angles(const EnbsConfig& cfg)
{
    return {2.0 * std::atan2(std::abs(cfg.alpha2), std::abs(cfg.alpha1)), prepared_phase(cfg)};
}

double visibility(const EnbsConfig& cfg)
{
    const SignalDensity rho = reduced_density(cfg);
    if (!(rho.trace() > 0.0))
        throw DomainError("visibility undefined: both seed amplitudes are zero");
    const SignalDensity n = rho.normalized();
    return 2.0 * std::sqrt(n.rho11 * n.rho22) * idler_overlap(cfg.alpha1, cfg.alpha2);
}

double fringe_visibility(const SignalDensity& rho)
{
    if (!(rho.trace() > 0.0))
        throw DomainError("visibility undefined for a zero-trace signal block");
    return 2.0 * std::abs(rho.coherence) / rho.trace();
}

double nd_filter_visibility(double alpha_sq, double overlap_factor)
{
    if (alpha_sq < 0.0)
        throw DomainError("alpha_sq must be non-negative");
    return overlap_factor * alpha_sq / (1.0 + alpha_sq);
}

double fringe_probability(double visibility, double detection_phase)
{
    return 0.5 * (1.0 + visibility * std::cos(detection_phase));
}

double detection_probability(const EnbsConfig& cfg, double phi_s)
{
    return fringe_probability(visibility(cfg), prepared_phase(cfg) + phi_s);
}

DualityTriple duality_triple(const SignalDensity& rho)
{
    const SignalDensity n = rho.normalized();
    const double tr_sq = n.rho11 * n.rho11 + n.rho22 * n.rho22 + 2.0 * std::norm(n.coherence);
    return {std::abs(n.rho11 - n.rho22), 2.0 * std::abs(n.coherence), std::sqrt(std::max(0.0, 2.0 * tr_sq - 1.0))};
}

namespace {

constexpr std::size_t kSignal10 = 1; // |1,0>_s with little-endian flattening
constexpr std::size_t kSignal01 = 2; // |0,1>_s

StateD signal_basis(std::size_t index)
{
    VectorXcd v = VectorXcd::Zero(4);
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return {ModeSpace({1, 1}), std::move(v)};
}

int idler_cutoff(cdouble alpha)
{
    if (std::abs(alpha) > 4.0)
        throw DomainError("Fock oracle supports |alpha| <= 4");
    return coherent_cutoff(cdouble(std::abs(alpha), 0.0)) + 1;
}

} // namespace

StateD oracle_joint_state(const EnbsConfig& cfg)
{
    validate(cfg);
    const int c1 = idler_cutoff(cfg.alpha1);
    const int c2 = idler_cutoff(cfg.alpha2);
    const StateD seed1 = coherent_state(cdouble(std::abs(cfg.alpha1), 0.0), c1);
    const StateD seed2 = coherent_state(cdouble(std::abs(cfg.alpha2), 0.0), c2);

    const StateD idler_vac = tensor(seed1, seed2);
    const StateD idler_1 = tensor(apply_create(seed1, 0), seed2);
    const StateD idler_2 = tensor(seed1, apply_create(seed2, 0));

    const cdouble g1 = std::polar(cfg.r1, signal_output_phase(cfg.phi_p1, cfg.phi_sd1));
    const cdouble g2 = std::polar(cfg.r2, signal_output_phase(cfg.phi_p2, cfg.phi_sd2));

    const StateD term0 = tensor(signal_basis(0), idler_vac);
    const StateD term1 = tensor(signal_basis(kSignal10), idler_1);
    const StateD term2 = tensor(signal_basis(kSignal01), idler_2);
    VectorXcd psi = term0.amplitudes() + g1 * term1.amplitudes() + g2 * term2.amplitudes();
    return {term0.space(), std::move(psi)};
}

SignalDensity oracle_reduced_density(const EnbsConfig& cfg)
{
    const DensityD rho = partial_trace(oracle_joint_state(cfg), {0, 1});
    const auto i10 = static_cast<Eigen::Index>(kSignal10);
    const auto i01 = static_cast<Eigen::Index>(kSignal01);
    SignalDensity out;
    out.rho11 = rho(i10, i10).real();
    out.rho22 = rho(i01, i01).real();
    // The seeded output phase phi_p - phi_sd puts e^{+i phi} on <1,0|rho|0,1>;
    // the analytic block carries e^{-i phi} there, so read the transpose.
    out.coherence = rho(i01, i10);
    return out;
}

double oracle_idler_overlap(cdouble alpha1, cdouble alpha2)
{
    const int c1 = idler_cutoff(alpha1);
    const int c2 = idler_cutoff(alpha2);
    const StateD s1 = coherent_state(cdouble(std::abs(alpha1), 0.0), c1);
    const StateD s2 = coherent_state(cdouble(std::abs(alpha2), 0.0), c2);
    const StateD left = tensor(photon_add(s1, 0).state, s2);
    const StateD right = tensor(s1, photon_add(s2, 0).state);
    return std::abs(overlap(left, right));
}

} // namespace brightdark
