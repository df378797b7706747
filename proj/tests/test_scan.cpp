#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "brightdark/scan.hpp"

using namespace brightdark;

namespace {

ScanSpec noiseless(ScanTarget t, int steps = 100)
{
    ScanSpec s;
    s.target = t;
    s.steps = steps;
    return s;
}

double detection_phase_at(const ScanSpec& spec, double x)
{
    EnbsConfig cfg = spec.base;
    double phi_s = spec.phi_s0;
    if (spec.target == ScanTarget::pump)
        cfg.phi_p2 += x;
    else if (spec.target == ScanTarget::seed)
        cfg.phi_sd2 += x;
    else
        phi_s += x;
    return prepared_phase(cfg) + phi_s;
}

} // namespace

TEST_CASE("SplitMix64")
{
    SUBCASE("reference sequence for seed 0")
    {
        SplitMix64 r(0);
        CHECK(r.next() == 0xE220A8397B1DCDAFULL);
        CHECK(r.next() == 0x6E789E6AA1B965F4ULL);
        CHECK(r.next() == 0x06C45D188009454FULL);
    }
    SUBCASE("streams are reproducible and distinct")
    {
        auto a = SplitMix64::stream(42, 3);
        auto b = SplitMix64::stream(42, 3);
        auto c = SplitMix64::stream(42, 4);
        const auto va = a.next();
        CHECK(va == b.next());
        CHECK(va != c.next());
    }
    SUBCASE("uniform stays in [0, 1)")
    {
        SplitMix64 r(9);
        double lo = 1, hi = 0, sum = 0;
        for (int i = 0; i < 100000; ++i) {
            const double u = r.uniform();
            lo = std::min(lo, u);
            hi = std::max(hi, u);
            sum += u;
        }
        CHECK(lo >= 0.0);
        CHECK(hi < 1.0);
        CHECK(std::abs(sum / 100000 - 0.5) < 0.005);
    }
    SUBCASE("normal moments")
    {
        SplitMix64 r(10);
        double s = 0, s2 = 0;
        const int n = 200000;
        for (int i = 0; i < n; ++i) {
            const double z = r.normal();
            s += z;
            s2 += z * z;
        }
        CHECK(std::abs(s / n) < 0.01);
        CHECK(std::abs(s2 / n - 1.0) < 0.02);
    }
    SUBCASE("Poisson mean and variance in both sampling regimes")
    {
        for (double mean : {0.5, 5.0, 9.9, 10.0, 60.0, 60000.0}) {
            SplitMix64 r(77);
            const int n = 40000;
            double s = 0, s2 = 0;
            for (int i = 0; i < n; ++i) {
                const double k = static_cast<double>(r.poisson(mean));
                CHECK(k >= 0.0);
                s += k;
                s2 += k * k;
            }
            const double m = s / n;
            const double var = s2 / n - m * m;
            CAPTURE(mean);
            CHECK(std::abs(m - mean) < 4.0 * std::sqrt(mean / n));
            CHECK(std::abs(var / mean - 1.0) < 0.05);
        }
        SplitMix64 r(1);
        CHECK(r.poisson(0.0) == 0);
        CHECK_THROWS_AS(r.poisson(-1.0), DomainError);
    }
}

TEST_CASE("scan targets")
{
    CHECK(parse_scan_target("pump") == ScanTarget::pump);
    CHECK(to_string(ScanTarget::seed) == "seed");
    CHECK_THROWS_AS(parse_scan_target("idler"), DomainError);
    CHECK(slope_sign(ScanTarget::pump) == -1);
    CHECK(slope_sign(ScanTarget::signal) == 1);
}

TEST_CASE("run_scan")
{
    SUBCASE("grid and extremes")
    {
        const FringeDataset d = run_scan(noiseless(ScanTarget::signal, 101));
        REQUIRE(d.points.size() == 101);
        CHECK(d.points.front().phase == 0.0);
        CHECK(d.points.back().phase == doctest::Approx(kTwoPi));
        const double v = 100.0 / 101.0;
        CHECK(d.points[0].p_bright == doctest::Approx((1 + v) / 2).epsilon(1e-14));
        CHECK(d.points[50].p_bright == doctest::Approx((1 - v) / 2).epsilon(1e-12));
        CHECK(!d.points[0].counts);
    }
    SUBCASE("every point sits on the fringe law at its detection phase")
    {
        for (ScanTarget t : {ScanTarget::pump, ScanTarget::seed, ScanTarget::signal}) {
            ScanSpec s = noiseless(t, 40);
            s.base.phi_sd1 = 0.3;
            s.base.phi_p1 = -1.2;
            s.phi_s0 = 0.25;
            for (const auto& p : run_scan(s).points)
                CHECK(std::abs(p.p_bright - fringe_probability(visibility(s.base), detection_phase_at(s, p.phase))) < 1e-14);
        }
    }
    SUBCASE("pump and seed scans mirror each other")
    {
        const auto pump = run_scan(noiseless(ScanTarget::pump, 64)).points;
        const auto seed = run_scan(noiseless(ScanTarget::seed, 64)).points;
        for (std::size_t k = 0; k < pump.size(); ++k)
            CHECK(std::abs(pump[k].p_bright - seed[pump.size() - 1 - k].p_bright) < 1e-12);
    }
    SUBCASE("unseeded second source gives a flat half")
    {
        ScanSpec s = noiseless(ScanTarget::signal, 20);
        s.base.alpha2 = 0.0;
        s.base.r1 = s.base.r2 = 0.01;
        for (const auto& p : run_scan(s).points)
            CHECK(p.p_bright == doctest::Approx(0.5));
    }
    SUBCASE("noise is deterministic per seed and point")
    {
        ScanSpec s = noiseless(ScanTarget::seed, 50);
        s.noise = NoiseSpec{30000.0, 12345, 0.0};
        const auto a = run_scan(s);
        const auto b = run_scan(s);
        for (std::size_t k = 0; k < a.points.size(); ++k)
            CHECK(*a.points[k].counts == *b.points[k].counts);
        s.noise->rng_seed = 12346;
        const auto c = run_scan(s);
        int same = 0;
        for (std::size_t k = 0; k < a.points.size(); ++k)
            same += *a.points[k].counts == *c.points[k].counts;
        CHECK(same < 5);
    }
    SUBCASE("invalid specs")
    {
        CHECK_THROWS_AS(run_scan(noiseless(ScanTarget::signal, 7)), DomainError);
        ScanSpec s = noiseless(ScanTarget::signal);
        s.stop = s.start;
        CHECK_THROWS_AS(run_scan(s), DomainError);
        s = noiseless(ScanTarget::signal);
        s.base.r1 = 0.5;
        CHECK_THROWS_AS(run_scan(s), DomainError);
    }
}

TEST_CASE("fit_fringe")
{
    SUBCASE("recovers synthetic parameters exactly")
    {
        for (double delta : {-2.5, -0.4, 0.0, 1.3, 3.0}) {
            FringeDataset d;
            for (int k = 0; k < 30; ++k) {
                const double x = 0.1 + 0.2 * k;
                d.points.push_back({x, 0.2 * (1 + 0.7 * std::cos(x + delta)), std::nullopt, std::nullopt});
            }
            const FitResult f = fit_fringe(d);
            CHECK(f.visibility == doctest::Approx(0.7).epsilon(1e-12));
            CHECK(phase_distance(f.delta, delta) < 1e-12);
            CHECK(f.offset == doctest::Approx(0.2).epsilon(1e-12));
            CHECK(f.rms_residual < 1e-14);
        }
    }
    SUBCASE("constant data has zero visibility")
    {
        FringeDataset d;
        for (int k = 0; k < 16; ++k)
            d.points.push_back({0.4 * k, 0.5, std::nullopt, std::nullopt});
        CHECK(fit_fringe(d).visibility < 1e-14);
    }
    SUBCASE("short span and too few points are rejected")
    {
        FringeDataset d;
        for (int k = 0; k < 16; ++k)
            d.points.push_back({0.1 * k, 0.5, std::nullopt, std::nullopt});
        CHECK_THROWS_AS(fit_fringe(d), DomainError);
        d.points.resize(5);
        CHECK_THROWS_AS(fit_fringe(d), DomainError);
    }
    SUBCASE("Poisson counts at 30000 per frame")
    {
        const double truth = 100.0 / 101.0;
        int within = 0;
        for (std::uint64_t seed = 0; seed < 200; ++seed) {
            ScanSpec s = noiseless(ScanTarget::signal);
            s.noise = NoiseSpec{30000.0, seed, 0.0};
            within += std::abs(fit_fringe(run_scan(s)).visibility - truth) <= 0.01;
        }
        CHECK(within >= 190);
    }
    SUBCASE("background lowers the fitted visibility")
    {
        ScanSpec s = noiseless(ScanTarget::signal);
        s.noise = NoiseSpec{30000.0, 4, 30000.0};
        const double v = fit_fringe(run_scan(s)).visibility;
        // mean level 2N P + N doubles while the swing stays N V
        CHECK(std::abs(v - (100.0 / 101.0) / 2.0) < 0.01);
    }
}

TEST_CASE("three-scan equivalence")
{
    SUBCASE("default seeding")
    {
        const ThreeScanReport r = three_scan_equivalence(EnbsConfig{}, 100);
        REQUIRE(r.scans.size() == 3);
        CHECK(r.equivalent);
        CHECK(r.pump_seed_opposite);
        CHECK(r.max_visibility_spread < 1e-9);
        for (const auto& s : r.scans)
            CHECK(s.fit.visibility == doctest::Approx(100.0 / 101.0).epsilon(1e-12));
    }
    SUBCASE("unequal seeding and nonzero phases")
    {
        EnbsConfig cfg;
        cfg.alpha1 = 1.0;
        cfg.alpha2 = 3.0;
        cfg.phi_p1 = 0.6;
        cfg.phi_sd2 = -1.1;
        const ThreeScanReport r = three_scan_equivalence(cfg, 64);
        CHECK(r.max_visibility_spread < 1e-9);
        CHECK(r.scans[0].fit.visibility == doctest::Approx(visibility(cfg)).epsilon(1e-12));
    }
}

TEST_CASE("bloch_map puts each point at its detection phase")
{
    for (ScanTarget t : {ScanTarget::pump, ScanTarget::seed, ScanTarget::signal}) {
        ScanSpec s = noiseless(t, 37); // 10 degree grid
        s.base.phi_sd1 = 0.45;
        s.phi_s0 = -0.2;
        const FringeDataset d = run_scan(s);
        const FitResult f = fit_fringe(d);
        const auto pts = bloch_map(d, f, 2.0);
        REQUIRE(pts.size() == d.points.size());
        for (std::size_t k = 0; k < pts.size(); ++k) {
            CHECK(std::hypot(pts[k].x, pts[k].y) == doctest::Approx(2.0));
            const double angle = std::atan2(pts[k].y, pts[k].x);
            CHECK(phase_distance(angle, detection_phase_at(s, d.points[k].phase)) < 1e-9);
            if (k > 0) {
                const double prev = std::atan2(pts[k - 1].y, pts[k - 1].x);
                CHECK(std::abs(wrap_phase(angle - prev) - slope_sign(t) * kTwoPi / 36) < 1e-9);
            }
        }
    }

    SUBCASE("70 degree point with zero base phases")
    {
        ScanSpec s = noiseless(ScanTarget::signal, 37);
        const FringeDataset d = run_scan(s);
        const auto pts = bloch_map(d, fit_fringe(d));
        CHECK(std::atan2(pts[7].y, pts[7].x) == doctest::Approx(70.0 * kPi / 180.0));
        CHECK(d.points[7].p_bright == doctest::Approx(0.5 * (1 + 100.0 / 101.0 * std::cos(70.0 * kPi / 180.0))));
    }
}

TEST_CASE("high_flux")
{
    const FringeDataset d = run_scan(noiseless(ScanTarget::signal, 50));
    const FringeDataset h1 = high_flux(d, 1000.0);
    const FringeDataset h2 = high_flux(d, 2000.0);
    for (std::size_t k = 0; k < d.points.size(); ++k) {
        CHECK(*h2.points[k].expected_counts == doctest::Approx(2.0 * *h1.points[k].expected_counts));
        CHECK(!h1.points[k].counts);
    }
    CHECK(fit_fringe(h2).visibility == doctest::Approx(fit_fringe(d).visibility).epsilon(1e-12));
    CHECK(fit_fringe(h2).offset == doctest::Approx(2000.0 * fit_fringe(d).offset).epsilon(1e-12));
    CHECK(*h2.n_bar == 2000.0);
    CHECK_THROWS_AS(high_flux(d, -1.0), DomainError);
}

TEST_CASE("photon budget and path phase")
{
    const PhotonBudget b = photon_budget(0.01, 10e-3, 250e6);
    CHECK(b.bins == 2500000);
    CHECK(b.expected_counts == 25000.0);
    CHECK(photon_budget(0.02, 10e-3, 250e6).expected_counts == 50000.0);
    CHECK_THROWS_AS(photon_budget(0.01, 0.0, 250e6), DomainError);

    CHECK(phase_from_path(807e-9 / 4, 807e-9) == doctest::Approx(kPi / 2));
    CHECK(phase_from_path(-807e-9, 807e-9) == doctest::Approx(-kTwoPi));
    CHECK_THROWS_AS(phase_from_path(1e-9, 0.0), DomainError);
}

TEST_CASE("comb spectrum")
{
    CombSpec spec;
    const auto coherent = comb_spectrum(spec);
    REQUIRE(coherent.size() == static_cast<std::size_t>(spec.n_pulses * spec.samples_per_period / 2 + 1));
    const double df = coherent[1].frequency;
    CHECK(df == doctest::Approx(spec.f_rep / spec.n_pulses));

    SUBCASE("peaks sit on the repetition harmonics")
    {
        std::set<long long> harmonics;
        for (const auto& l : coherent) {
            if (!l.is_peak)
                continue;
            const double k = l.frequency / spec.f_rep;
            CHECK(std::abs(k - std::round(k)) * spec.f_rep <= df);
            harmonics.insert(std::llround(k));
        }
        for (long long k = 1; k <= 4; ++k)
            CHECK(harmonics.count(k) == 1);
    }
    SUBCASE("phase noise washes out the comb")
    {
        CombSpec noisy = spec;
        noisy.carrier_phase_noise_rms = kPi;
        noisy.rng_seed = 3;
        const double c0 = peak_to_floor_db(coherent, spec.f_rep);
        const double c1 = peak_to_floor_db(comb_spectrum(noisy), spec.f_rep);
        CHECK(c0 - c1 > 20.0);
        CHECK(comb_spectrum(noisy).size() == coherent.size());
    }
    SUBCASE("zero amplitude is flat at the floor")
    {
        CombSpec z = spec;
        z.amplitude = 0.0;
        for (const auto& l : comb_spectrum(z)) {
            CHECK(l.power_db == kSpectrumFloorDb);
            CHECK(!l.is_peak);
        }
    }
    SUBCASE("seeded noise is reproducible")
    {
        CombSpec noisy = spec;
        noisy.carrier_phase_noise_rms = 0.5;
        noisy.rng_seed = 8;
        const auto a = comb_spectrum(noisy);
        const auto b = comb_spectrum(noisy);
        for (std::size_t j = 0; j < a.size(); ++j)
            CHECK(a[j].power_db == b[j].power_db);
    }
    SUBCASE("guards")
    {
        CombSpec bad = spec;
        bad.samples_per_period = 4;
        CHECK_THROWS_AS(comb_spectrum(bad), DomainError);
        bad = spec;
        bad.n_pulses = 8;
        CHECK_THROWS_AS(comb_spectrum(bad), DomainError);
    }
}
