#include <doctest.h>

#include <cmath>
#include <random>

#include "brightdark/enbs.hpp"
#include "brightdark/unified.hpp"

using namespace brightdark;

namespace {

double brute_dirichlet(int m, double delta)
{
    cdouble s = 0;
    for (int k = 0; k < m; ++k)
        s += std::polar(1.0, k * delta);
    return std::norm(s) / (double(m) * m);
}

double sinc_sq(double beta)
{
    if (beta == 0.0)
        return 1.0;
    const double s = std::sin(beta) / beta;
    return s * s;
}

SlitSpec slit_over_beta(int segments, double beta_max, int points)
{
    SlitSpec s;
    s.segments = segments;
    const double kb2 = 0.5 * s.wavenumber * s.width;
    for (double beta : linspace(-beta_max, beta_max, points))
        s.angles.push_back(std::asin(beta / kb2));
    return s;
}

double sup_error(const SlitSpec& s)
{
    double err = 0;
    for (const Sample& p : slit_bright_occupation(s))
        err = std::max(err, std::abs(p.y - sinc_sq(fraunhofer_beta(s.wavenumber, s.width, p.x))));
    return err;
}

} // namespace

TEST_CASE("Lambda system")
{
    SUBCASE("closed-form dark state")
    {
        const LambdaSpec spec{3.0, 4.0, 0.7};
        const CollectiveSystem sys = lambda_system(spec);
        REQUIRE(sys.basis.dark_count() == 1);
        VectorXcd dark(2);
        dark << 4.0 / 5.0, -std::polar(3.0 / 5.0, -0.7);
        CHECK((sys.basis.dark.col(0) - dark).norm() < 1e-12);
        CHECK(sys.basis.residual <= 1e-12);
    }
    SUBCASE("random Rabi frequencies and phases")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> om(1e-3, 1e3), ph(-kPi, kPi);
        for (int i = 0; i < 500; ++i) {
            const CollectiveSystem sys = lambda_system({om(rng), om(rng), ph(rng)});
            CHECK(sys.basis.residual <= 1e-12);
            CHECK(sys.basis.bright_count() == 1);
        }
    }
    SUBCASE("one field off makes the other ground state dark")
    {
        const CollectiveSystem sys = lambda_system({1.0, 0.0, 0.0});
        CHECK(std::abs(sys.basis.dark(1, 0)) == doctest::Approx(1.0));
    }
    SUBCASE("invalid fields")
    {
        CHECK_THROWS_AS(lambda_system({0.0, 0.0, 0.0}), DomainError);
        CHECK_THROWS_AS(lambda_system({-1.0, 1.0, 0.0}), DomainError);
    }
}

TEST_CASE("N-slit system")
{
    for (int n = 2; n <= 64; ++n) {
        std::vector<double> rel(static_cast<std::size_t>(n - 1));
        for (int j = 0; j < n - 1; ++j)
            rel[static_cast<std::size_t>(j)] = 0.37 * (j + 1);
        const CollectiveSystem sys = nslit_system(n, rel);
        CHECK(sys.basis.dark_count() == n - 1);
        CHECK(sys.basis.residual <= 1e-10);
    }

    SUBCASE("N-1 relative phases equal N phases with a leading zero")
    {
        const std::vector<double> rel{0.5, -1.0};
        const std::vector<double> all{0.0, 0.5, -1.0};
        CHECK((nslit_system(3, rel).coupling.rows() - nslit_system(3, all).coupling.rows()).norm() == 0.0);
    }
    SUBCASE("two slits reproduce the two-mode detector")
    {
        const std::vector<double> rel{0.8};
        const auto sys = nslit_system(2, rel);
        CHECK((sys.coupling.rows() - two_mode_detector(0.8).rows()).norm() < 1e-15);
    }
    SUBCASE("bad arguments")
    {
        const std::vector<double> rel{0.5};
        CHECK_THROWS_AS(nslit_system(1, {}), DomainError);
        CHECK_THROWS_AS(nslit_system(4, rel), DomainError);
    }
}

TEST_CASE("Dirichlet profile")
{
    SUBCASE("agrees with the direct phasor sum")
    {
        for (int m : {2, 3, 4, 5, 8, 13})
            for (double d : linspace(-3 * kPi, 3 * kPi, 601))
                CHECK(std::abs(dirichlet_value(m, d) - brute_dirichlet(m, d)) < 1e-12);
    }
    SUBCASE("two sources are the unit-visibility fringe")
    {
        DirichletSpec spec{2, linspace(-kTwoPi, kTwoPi, 401)};
        for (const Sample& s : dirichlet_profile(spec))
            CHECK(std::abs(s.y - fringe_probability(1.0, s.x)) < 1e-12);
    }
    SUBCASE("first zeros at 2 pi / M")
    {
        for (int m : {3, 4, 8}) {
            CHECK(dirichlet_value(m, kTwoPi / m) < 1e-12);
            CHECK(dirichlet_value(m, -kTwoPi / m) < 1e-12);
        }
    }
    SUBCASE("principal maxima, periodicity and symmetry")
    {
        CHECK(dirichlet_value(5, 0.0) == 1.0);
        CHECK(dirichlet_value(5, 2 * kTwoPi) == 1.0);
        for (double d : {0.3, 1.1, 2.9})
            for (int m : {3, 6}) {
                CHECK(dirichlet_value(m, d) == doctest::Approx(dirichlet_value(m, -d)).epsilon(1e-12));
                CHECK(dirichlet_value(m, d) == doctest::Approx(dirichlet_value(m, d + kTwoPi)).epsilon(1e-9));
            }
    }
    CHECK_THROWS_AS(dirichlet_profile({1, {0.0}}), DomainError);
}

TEST_CASE("continuous slit limit")
{
    SUBCASE("sinc squared to 1e-3 at 1024 segments")
    {
        CHECK(sup_error(slit_over_beta(1024, 3 * kPi, 2001)) < 1e-3);
    }
    SUBCASE("error falls as the segment count doubles")
    {
        double last = 1e9;
        for (int k = 64; k <= 1024; k *= 2) {
            const double e = sup_error(slit_over_beta(k, 3 * kPi, 601));
            CAPTURE(k);
            CHECK(e < last);
            last = e;
        }
    }
    SUBCASE("forward direction and first zero")
    {
        SlitSpec s = slit_over_beta(1024, kPi, 3);
        const auto occ = slit_bright_occupation(s);
        CHECK(occ[0].y <= 1e-4);
        CHECK(occ[1].y == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(occ[2].y <= 1e-4);
    }
    SUBCASE("guards")
    {
        SlitSpec s;
        s.segments = 8;
        CHECK_THROWS_AS(slit_bright_occupation(s), DomainError);
        s = SlitSpec{};
        s.angles = {2.0};
        CHECK_THROWS_AS(slit_bright_occupation(s), DomainError);
    }
    CHECK(fraunhofer_beta(2.0, 3.0, kPi / 2) == doctest::Approx(3.0));
}

TEST_CASE("slit Fourier basis")
{
    SlitSpec s;
    s.segments = 64;
    for (double theta : {0.0, 0.01, -0.2}) {
        const ModeBasis b = slit_dark_basis(s, theta);
        CHECK(b.bright_count() == 1);
        CHECK(b.dark_count() == 63);
        MatrixXcd all(64, 64);
        all << b.bright, b.dark;
        CHECK((all.adjoint() * all - MatrixXcd::Identity(64, 64)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK(b.residual < 1e-12);
        // The bright column is the detector mode itself.
        const RowVectorXcd row = slit_detector_row(s, theta);
        CHECK(std::abs(std::abs((row * b.bright.col(0))(0)) - 1.0) < 1e-12);
    }
}

TEST_CASE("second-order correlation")
{
    SlitSpec s;
    s.angles = linspace(-0.25, 0.25, 101);
    s.angles.erase(s.angles.begin() + 50); // theta = 0 is covered separately below
    s.angles.push_back(0.0);

    SUBCASE("Fock states give 1 - 1/N everywhere")
    {
        for (int n : {1, 2, 3, 5}) {
            const auto prof = g2_profile(FockInput{n}, s);
            double lo = 1e9, hi = -1e9;
            for (const Sample& p : prof) {
                REQUIRE(std::isfinite(p.y));
                lo = std::min(lo, p.y);
                hi = std::max(hi, p.y);
            }
            CAPTURE(n);
            CHECK(std::abs(lo - (1.0 - 1.0 / n)) < 1e-12);
            CHECK(hi - lo < 1e-12);
        }
    }
    SUBCASE("coherent light gives 1")
    {
        for (const Sample& p : g2_profile(CoherentInput{cdouble(1.5, 0.0)}, s))
            CHECK(std::abs(p.y - 1.0) < 1e-12);
        for (const Sample& p : g2_profile(CoherentInput{std::polar(0.3, 1.0)}, s))
            CHECK(std::abs(p.y - 1.0) < 1e-12);
    }
    SUBCASE("invalid inputs")
    {
        CHECK_THROWS_AS(g2_profile(FockInput{0}, s), DomainError);
        CHECK_THROWS_AS(g2_profile(CoherentInput{cdouble(0, 0)}, s), DomainError);
    }
}
