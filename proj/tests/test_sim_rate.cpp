#include <didcap/sim_rate.hpp>

#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace didcap;

namespace {

std::vector<std::uint8_t> to_bytes(std::uint64_t w, int len)
{
    std::vector<std::uint8_t> b(len);
    for (int i = 0; i < len; ++i) b[i] = static_cast<std::uint8_t>((w >> i) & 1U);
    return b;
}

}  // namespace

TEST(Likelihood, OutputMatchesEnumeration)
{
    for (auto [pi, pd, a] : {std::tuple{0.2, 0.3, 0.4}, {0.5, 0.5, 0.5}, {0.05, 0.6, 0.9}})
        for (int n : {1, 3, 6})
            for (std::uint64_t yw = 0; yw < (std::uint64_t{1} << n); ++yw) {
                const auto y = to_bytes(yw, n);
                const double ref = oracle::output_probability(pi, pd, a, oracle::bits(yw, n));
                EXPECT_NEAR(std::exp2(log2_output_likelihood({pi, pd}, MarkovInput{a}, y)), ref, 1e-13);
            }
}

TEST(Likelihood, ConditionalMatchesEnumeration)
{
    const ChannelParams p{0.15, 0.35};
    for (int n : {2, 5, 8}) {
        for (std::uint64_t xw = 0; xw < (std::uint64_t{1} << (n + 1)); xw += 3) {
            const auto law = oracle::channel_law(0.15, 0.35, xw, n);
            const auto x = to_bytes(xw, n + 1);
            for (std::uint64_t yw = 0; yw < law.size(); ++yw) {
                const double lp = log2_conditional_likelihood(p, x, to_bytes(yw, n));
                if (law[yw] == 0.0)
                    EXPECT_TRUE(std::isinf(lp));
                else
                    EXPECT_NEAR(std::exp2(lp), law[yw], 1e-13);
            }
        }
    }
}

TEST(Likelihood, LongPathsDoNotUnderflow)
{
    Rng rng(1);
    const auto x = sample_markov_input(MarkovInput{0.5}, 20000, rng);
    const auto s = sample_channel({0.2, 0.2}, x, rng);
    const double lp = log2_conditional_likelihood({0.2, 0.2}, x, s.y);
    EXPECT_TRUE(std::isfinite(lp));
    EXPECT_LT(lp, -1000.0);
    EXPECT_THROW((void)log2_conditional_likelihood({0.2, 0.2}, x, std::span(s.y).first(10)), domain_error);
}

TEST(SimulateRates, OrderedEstimates)
{
    const auto r = simulate_rates({0.5, 0.5}, MarkovInput{0.5}, 20000, 4, 7);
    EXPECT_LE(r.output.mean, 1.0);
    EXPECT_GT(r.conditional.mean, 0.0);
    EXPECT_LT(r.conditional.mean, r.output.mean);
    EXPECT_NEAR(r.info.mean, r.output.mean - r.conditional.mean, 1e-12);
}

TEST(SimulateRates, ConstantInputHasZeroConditionalEntropy)
{
    const auto r = simulate_rates({0.2, 0.3}, MarkovInput{0.0}, 5000, 3, 2);
    EXPECT_NEAR(r.conditional.mean, 0.0, 1e-12);
    EXPECT_NEAR(r.output.mean, 0.0, 2e-3);  // only the uniform X_0 is unknown
}

TEST(SimulateRates, DeterministicAndThreadIndependent)
{
    const ChannelParams p{0.1, 0.1};
    const MarkovInput in{0.4};
    const auto a = simulate_rates(p, in, 5000, 6, 123, 1);
    const auto b = simulate_rates(p, in, 5000, 6, 123, 3);
    EXPECT_EQ(a.info.mean, b.info.mean);
    EXPECT_EQ(a.conditional.half_width, b.conditional.half_width);
    const auto c = simulate_rates(p, in, 5000, 6, 124, 1);
    EXPECT_NE(a.info.mean, c.info.mean);
}

TEST(SimulateRates, Guards)
{
    EXPECT_THROW((void)simulate_rates({0.1, 0.1}, MarkovInput{0.5}, 999, 4, 1), domain_error);
    EXPECT_THROW((void)simulate_rates({0.1, 0.1}, MarkovInput{0.5}, 1000, 1, 1), domain_error);
    EXPECT_THROW((void)simulate_rates({0.0, 0.0}, MarkovInput{0.5}, 1000, 4, 1), degenerate_parameters);
    EXPECT_THROW((void)simulate_rates({0.1, 0.1}, MarkovInput{1.5}, 1000, 4, 1), domain_error);
}

TEST(SimulateRates, ConditionalRateMatchesSeries)
{
    const ChannelParams p{0.1, 0.1};
    const auto r = estimate_conditional_entropy_rate(p, MarkovInput{0.5}, 100'000, 8, 5);
    const double exact = second_term(p, 0.5).value;
    EXPECT_LT(r.half_width, 5e-3);
    EXPECT_NEAR(r.mean, exact, 2 * r.half_width + 1e-3);
}

TEST(SimulateRates, InfoRateAboveLowerBound)
{
    const ChannelParams p{0.1, 0.1};
    const auto r = estimate_info_rate(p, MarkovInput{0.5}, 100'000, 8, 9);
    EXPECT_GE(r.mean, iud_lower_bound(p).value - 2 * r.half_width);
    EXPECT_LE(r.mean, genie_erasure(p) + 2 * r.half_width);
    EXPECT_EQ(r.samples, 8U);
    EXPECT_EQ(r.quantity, RateQuantity::info_rate);
}
