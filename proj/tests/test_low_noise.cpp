#include <didcap/low_noise.hpp>

#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"

using namespace didcap;

TEST(SeriesR, Values)
{
    EXPECT_EQ(series_R(0.0, 3), 0.0);
    EXPECT_DOUBLE_EQ(series_R(0.5, 4), 1.0);
    EXPECT_NEAR(series_R(0.1, 1), oracle::h2(0.1), 1e-15);
    EXPECT_NEAR(series_R(0.1, 3), oracle::h2(0.5 + 0.5 * std::pow(0.8, 3)), 1e-14);
    // equals H(Z_n | Z_{n-k}) for the symmetric chain
    for (long k : {1L, 2L, 7L, 30L}) EXPECT_NEAR(series_R(0.2, k), cond_state_entropy({0.2, 0.2}, k), 1e-14);
    EXPECT_THROW((void)series_R(0.6, 1), domain_error);
    EXPECT_THROW((void)series_R(0.1, 0), domain_error);
}

TEST(SeriesR, ConcaveInP)
{
    for (long k = 1; k <= 50; ++k)
        for (int i = 1; i < 49; ++i) {
            const double p = 0.01 * i;
            const double d2 = series_R(p + 0.01, k) - 2 * series_R(p, k) + series_R(p - 0.01, k);
            EXPECT_LE(d2, 1e-9) << k << ' ' << p;
        }
}

TEST(Expansion, Endpoints)
{
    EXPECT_DOUBLE_EQ(expansion(0.0).value, 1.0);
    const auto half = expansion(0.5);
    EXPECT_NEAR(half.value, 0.5, half.tail_bound);
    EXPECT_GT(half.value, 0.5);
    const auto r = expansion(0.1, 1e-9);
    EXPECT_LT(r.tail_bound, 1e-9);
    EXPECT_LE(r.tail_bound, std::ldexp(1.0, -static_cast<int>(r.K + 1)));
    EXPECT_NEAR(r.value, expansion(0.1, 1e-15).value, r.tail_bound);
    EXPECT_THROW((void)expansion(0.6), domain_error);
}

TEST(Expansion, CloseToIudRate)
{
    EXPECT_LT(std::abs(expansion(0.05).value - iud_lower_bound({0.05, 0.05}).value), 5e-3);
}

TEST(Expansion, ConvexInP)
{
    for (int i = 1; i < 49; ++i) {
        const double p = 0.01 * i;
        EXPECT_GE(expansion(p + 0.01).value - 2 * expansion(p).value + expansion(p - 0.01).value, -1e-9) << p;
    }
}

TEST(RateFunction, Values)
{
    EXPECT_NEAR(rate_function_f(0, 0, {1e-12, 1e-12}), 1.0, 1e-9);
    EXPECT_NEAR(rate_function_f(0.75, -0.25, {0.3, 0.3}), 0.0, 1e-15);
    EXPECT_THROW((void)rate_function_f(0.5, 0.1, {0.1, 0.1}), domain_error);
    EXPECT_THROW((void)rate_function_f(-0.3, 0.0, {0.1, 0.1}), domain_error);
}

TEST(RateFunction, IudMatchesEnumeration)
{
    // At (0, 0) the input is i.u.d.: H(Y_n | Y_{n-1}) = H(Y_1, Y_2) - 1.
    for (auto [pi, pd] : {std::pair{0.01, 0.01}, {0.1, 0.1}, {0.3, 0.3}, {0.3, 0.1}}) {
        double h12 = 0.0;
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                const double p = oracle::output_probability(pi, pd, 0.5, {a, b});
                h12 -= p * std::log2(p);
            }
        const double expect = h12 - 1.0 - oracle::second_term(pi, pd, 0.5);
        EXPECT_NEAR(rate_function_f(0, 0, {pi, pd}), expect, 1e-12) << pi << ' ' << pd;
    }
}

TEST(RateFunction, ExpansionIsZeroOrder)
{
    for (double p : {0.04, 0.02, 0.01}) {
        const double f0 = rate_function_f(0, 0, ChannelParams::symmetric(p));
        EXPECT_LT(std::abs(f0 - expansion(p).value), 10 * p * p) << p;
    }
}

TEST(TaylorCoefficients, FrozenValues)
{
    const auto t = taylor_coefficients(0.1, 0, 0, 1);
    EXPECT_NEAR(t.A1, 0.27578, 5e-5);
    EXPECT_NEAR(t.A2, 0.29022, 5e-5);
    EXPECT_NEAR(t.B20, 2.1012, 5e-4);
    EXPECT_NEAR(t.B11, 1.8409, 5e-4);
    EXPECT_NEAR(t.B02, 1.6095, 5e-4);
    EXPECT_GT(t.B20, 0.0);
}

TEST(TaylorCoefficients, AVanishesAtZeroNoise)
{
    const auto t = taylor_coefficients(1e-9, 0, 0, 1);
    EXPECT_NEAR(t.A1, 0.0, 1e-8);
    EXPECT_NEAR(t.A2, 0.0, 1e-8);
}

TEST(TaylorCoefficients, MatchFiniteDifferences)
{
    for (double p : {0.05, 0.1, 0.2}) {
        const auto params = ChannelParams::symmetric(p);
        const auto t = taylor_coefficients(p, 0, 0, 1);
        auto f = [&](double d1, double d2) { return rate_function_f(d1, d2, params, 1e-15); };
        const double h = 1e-5;
        const double fd1 = (f(h, 0) - f(-h, 0)) / (2 * h);
        const double fd2 = (f(0, h) - f(0, -h)) / (2 * h);
        EXPECT_NEAR(t.A1, fd1, 1e-4 * std::abs(fd1));
        EXPECT_NEAR(t.A2, fd2, 1e-4 * std::abs(fd2));

        const double k = 1e-3;
        const double f20 = (f(k, 0) - 2 * f(0, 0) + f(-k, 0)) / (k * k);
        const double f02 = (f(0, k) - 2 * f(0, 0) + f(0, -k)) / (k * k);
        const double f11 = (f(k, k) - f(k, -k) - f(-k, k) + f(-k, -k)) / (4 * k * k);
        EXPECT_NEAR(t.B20, -f20 / 2, 1e-4 * t.B20);
        EXPECT_NEAR(t.B02, -f02 / 2, 1e-4 * t.B02);
        EXPECT_NEAR(t.B11, -f11 / 2, 1e-4 * t.B11);
    }
}

TEST(TaylorCoefficients, Domain)
{
    EXPECT_THROW((void)taylor_coefficients(0.1, 0.75, -0.25, 1.0), domain_error);  // q = 1
    EXPECT_NO_THROW((void)taylor_coefficients(0.1, -0.25, -0.25, 1.0));            // q = 0
    const auto t = taylor_coefficients(0.1, 0.6, -0.25, 1.0);
    EXPECT_GT(t.terms, 50);
}

TEST(TaylorCoefficients, SeriesTruncationAgreesWithLongSum)
{
    const auto t = taylor_coefficients(0.2, 0.3, -0.1, 1.0, 1e-13);
    double s = 0.0;
    for (long k = 1; k <= 20000; ++k) s += detail::b_series_weight(t.q, k) * series_R(0.2, k);
    const double den = (1 - std::pow(0.1 + t.r, 2)) * std::log(2.0);
    EXPECT_NEAR(t.B11, 2 * 0.8 * 0.6 / den + 0.5 * s, 1e-11);
}

TEST(BSignMap, Examples)
{
    EXPECT_GT(b_coefficient(0.05, 0, 0), 0.0);
    // c scaling: (c, d1, d2) equals (1, c d1, c d2).
    EXPECT_NEAR(b_coefficient(0.2, 0.4, -0.1, 0.5), b_coefficient(0.2, 0.2, -0.05, 1.0), 1e-14);

    BSignGrid grid;
    grid.p_values = {0.05, 0.49};
    grid.delta1_values = {-0.25, 0.0, 0.5, 0.74, 0.75};
    grid.delta2_values = {-0.25, 0.0, 0.1};
    const auto rows = b_sign_map(grid);
    for (const auto& r : rows) {
        EXPECT_TRUE(taylor_point_feasible(r.delta1, r.delta2));
        EXPECT_LT(0.5 + r.delta1 + r.delta2, 1.0);
        EXPECT_EQ(r.sign, r.B_value > 0 ? 1 : (r.B_value < 0 ? -1 : 0));
        if (r.p_id == 0.05 && r.delta1 == 0.0 && r.delta2 == 0.0) {
            EXPECT_EQ(r.sign, 1);
        }
    }
    std::ostringstream os;
    write_b_sign_csv(os, rows);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "p_id,delta1,delta2,B_value,sign");
}
