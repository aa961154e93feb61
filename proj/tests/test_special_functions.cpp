#include <doctest.h>

#include <cmath>
#include <limits>

#include "fanova/errors.hpp"
#include "fanova/special_functions.hpp"

using fanova::chi_square_tail;
using fanova::f_tail;
using fanova::incomplete_beta;

namespace {

struct FCase {
    double f, df1, df2, expected;
};

struct ChiCase {
    double x, df, expected;
};

struct BetaCase {
    double a, b, x, expected;
};

// Reference values computed with mpmath at 30 digits.
constexpr FCase f_cases[] = {
    {0.5, 1, 1, 0.60817344796939273},
    {1.0, 1, 10, 0.34089313230205987},
    {2.5, 3, 7, 0.14350945627893922},
    {4.2, 2, 30, 0.024651903288156615},
    {0.37, 5, 3, 0.84408870493737263},
    {10.0, 4, 4, 0.023290758827948911},
    {0.001, 2, 2, 0.999000999000999},
    {100.0, 6, 60, 2.364380404419514e-29},
    {3.1, 11.89, 45.58, 0.0028891549379836488},
    {0.9, 0.5, 2.5, 0.33117564192853244},
};

constexpr ChiCase chi_cases[] = {
    {0.5, 1, 0.47950012218695346},
    {2.3, 2, 0.31663676937905325},
    {7.81, 3, 0.050106056350005941},
    {15.5, 7, 0.030098343817749346},
    {0.01, 4, 0.99998754158864572},
    {30.0, 12, 0.0027924293327009167},
    {117.745, 57, 4.0599972325900625e-6},
    {3.0, 2.5, 0.30584962944581791},
};

constexpr BetaCase beta_cases[] = {
    {2, 2, 0.5, 0.5},
    {3, 5, 0.25, 0.24359130859375},
    {0.5, 0.5, 0.9, 0.79516723530086657},
    {10, 2, 0.1, 1.0000000000000005e-9},
    {4, 4, 0.999, 0.99999999996508393},
    {2, 3, 1e-08, 5.9999999200000006e-16},
    {7.5, 0.3, 0.3, 1.1960859799291576e-5},
};

}  // namespace

TEST_CASE("incomplete beta matches reference values") {
    for (const auto& c : beta_cases) {
        CAPTURE(c.a);
        CAPTURE(c.b);
        CAPTURE(c.x);
        const double got = incomplete_beta(c.a, c.b, c.x);
        CHECK(got == doctest::Approx(c.expected).epsilon(1e-12));
    }
}

TEST_CASE("incomplete beta endpoints and symmetry") {
    CHECK(incomplete_beta(3.0, 4.0, 0.0) == 0.0);
    CHECK(incomplete_beta(3.0, 4.0, 1.0) == 1.0);
    // I_x(1,1) is the identity.
    for (double x : {0.1, 0.37, 0.92}) {
        CHECK(incomplete_beta(1.0, 1.0, x) == doctest::Approx(x).epsilon(1e-14));
    }
    // I_x(a,1) = x^a, I_x(1,b) = 1 - (1-x)^b.
    CHECK(incomplete_beta(5.0, 1.0, 0.7) == doctest::Approx(std::pow(0.7, 5.0)).epsilon(1e-13));
    CHECK(incomplete_beta(1.0, 5.0, 0.7) ==
          doctest::Approx(1.0 - std::pow(0.3, 5.0)).epsilon(1e-13));
    // I_x(a,b) + I_{1-x}(b,a) = 1.
    for (double x : {0.05, 0.5, 0.83}) {
        const double s = incomplete_beta(2.5, 7.0, x) + incomplete_beta(7.0, 2.5, 1.0 - x);
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("incomplete beta rejects bad arguments") {
    CHECK_THROWS_AS(incomplete_beta(0.0, 1.0, 0.5), fanova::ConfigError);
    CHECK_THROWS_AS(incomplete_beta(1.0, -2.0, 0.5), fanova::ConfigError);
    CHECK_THROWS_AS(incomplete_beta(1.0, 1.0, -0.1), fanova::ConfigError);
    CHECK_THROWS_AS(incomplete_beta(1.0, 1.0, 1.1), fanova::ConfigError);
    CHECK_THROWS_AS(incomplete_beta(std::nan(""), 1.0, 0.5), fanova::ConfigError);
}

TEST_CASE("F tail matches reference values") {
    for (const auto& c : f_cases) {
        CAPTURE(c.f);
        CAPTURE(c.df1);
        CAPTURE(c.df2);
        const double got = f_tail(c.f, c.df1, c.df2);
        CHECK(got == doctest::Approx(c.expected).epsilon(1e-10));
    }
}

TEST_CASE("F tail limits") {
    CHECK(f_tail(0.0, 3, 10) == 1.0);
    CHECK(f_tail(-2.0, 3, 10) == 1.0);
    CHECK(f_tail(std::numeric_limits<double>::infinity(), 3, 10) == 0.0);
    // Exact closed form for df1 = 2: P(F > f) = (1 + 2 f / df2)^(-df2/2).
    for (double f : {0.5, 1.0, 3.0}) {
        const double exact = std::pow(1.0 + 2.0 * f / 11.0, -5.5);
        CHECK(f_tail(f, 2, 11) == doctest::Approx(exact).epsilon(1e-12));
    }
    // Monotone decreasing in f.
    double prev = 1.0;
    for (double f = 0.1; f < 20.0; f += 0.7) {
        const double v = f_tail(f, 4, 17);
        CHECK(v < prev);
        prev = v;
    }
    CHECK_THROWS_AS(f_tail(1.0, 0, 5), fanova::ConfigError);
    CHECK_THROWS_AS(f_tail(1.0, 5, -1), fanova::ConfigError);
}

TEST_CASE("chi-square tail matches reference values") {
    for (const auto& c : chi_cases) {
        CAPTURE(c.x);
        CAPTURE(c.df);
        const double got = chi_square_tail(c.x, c.df);
        CHECK(got == doctest::Approx(c.expected).epsilon(1e-10));
    }
}

TEST_CASE("chi-square tail closed forms") {
    // df = 2: tail is exp(-x/2).
    for (double x : {0.3, 1.0, 6.2}) {
        CHECK(chi_square_tail(x, 2) == doctest::Approx(std::exp(-x / 2)).epsilon(1e-13));
    }
    // df = 1: tail is erfc(sqrt(x/2)).
    for (double x : {0.4, 2.0, 9.0}) {
        CHECK(chi_square_tail(x, 1) ==
              doctest::Approx(std::erfc(std::sqrt(x / 2))).epsilon(1e-12));
    }
    CHECK(chi_square_tail(0.0, 5) == 1.0);
    CHECK(chi_square_tail(-1.0, 5) == 1.0);
    CHECK_THROWS_AS(chi_square_tail(1.0, 0), fanova::ConfigError);
}
