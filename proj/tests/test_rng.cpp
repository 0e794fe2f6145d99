#include "conc/rng.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <thread>

using namespace conc;
namespace ts = testsupport;

TEST_CASE("philox4x32-10 known-answer vectors") {
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams replay and differ") {
    SeedContext a = derive_stream(42, 0);
    SeedContext b = derive_stream(42, 0);
    SeedContext c = derive_stream(42, 1);
    const auto xa = draw_normal(a, 1000);
    const auto xb = draw_normal(b, 1000);
    const auto xc = draw_normal(c, 1000);
    CHECK(xa == xb);
    CHECK(xa != xc);
    CHECK(a.counter == 1000);

    SUBCASE("copy replays") {
        SeedContext s = derive_stream(9, 3);
        SeedContext copy = s;
        CHECK(draw_normal(s, 10) == draw_normal(copy, 10));
    }
    SUBCASE("different seeds differ") {
        SeedContext s = derive_stream(43, 0);
        CHECK(draw_normal(s, 1000) != xa);
    }
}

TEST_CASE("stream is independent of the thread evaluating it") {
    SeedContext main_ctx = derive_stream(42, 7);
    const auto reference = draw_normal(main_ctx, 500);
    std::vector<std::vector<double>> results(8);
    std::vector<std::thread> threads;
    for (int k = 0; k < 8; ++k)
        threads.emplace_back([&results, k] {
            SeedContext ctx = derive_stream(42, 7);
            results[k] = draw_normal(ctx, 500);
        });
    for (auto& t : threads) t.join();
    for (const auto& r : results) CHECK(r == reference);
}

TEST_CASE("draw_normal splits consistently") {
    SeedContext a = derive_stream(5, 2);
    SeedContext b = derive_stream(5, 2);
    auto first = draw_normal(a, 500);
    const auto second = draw_normal(a, 500);
    first.insert(first.end(), second.begin(), second.end());
    CHECK(first == draw_normal(b, 1000));
    CHECK(draw_normal(a, 0).empty());
    CHECK(a.counter == 1000);
}

TEST_CASE("uniforms lie strictly inside the unit interval") {
    SeedContext ctx = derive_stream(1, 1);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = ctx.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
}

TEST_CASE("normal quantile inverts the normal CDF") {
    for (double p : {1e-300, 1e-100, 1e-20, 1e-10, 1e-5, 0.001, 0.02425, 0.1, 0.3, 0.5}) {
        const double q = normal_quantile(p);
        CHECK(ts::normal_cdf(q) == doctest::Approx(p).epsilon(1e-13));
        if (p >= 1e-5) CHECK(normal_quantile(1.0 - p) == doctest::Approx(-q).epsilon(1e-10));
    }
    CHECK(std::isinf(normal_quantile(0.0)));
    CHECK(normal_quantile(0.0) < 0.0);
    CHECK(normal_quantile(1.0) > 0.0);
    CHECK(std::isnan(normal_quantile(1.5)));
    CHECK(normal_quantile(0.5) == 0.0);
    CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-15));
}

TEST_CASE("normal draws: law of large numbers and KS") {
    SeedContext ctx = derive_stream(2024, 0);
    const auto x = draw_normal(ctx, 1000000);
    const double n = static_cast<double>(x.size());
    CHECK(std::fabs(ts::mean(x)) < 4.0 / std::sqrt(n));
    CHECK(std::fabs(ts::variance(x) - 1.0) < 0.01);

    const std::vector<double> head(x.begin(), x.begin() + 100000);
    CHECK(ts::ks_one_sample(head, ts::normal_cdf) < ts::ks_coefficient(0.001) / std::sqrt(1e5));
}

TEST_CASE("exponential draws") {
    SeedContext ctx = derive_stream(11, 0);
    const auto x = draw_exponential(ctx, 1.0, 1000000);
    CHECK(std::fabs(ts::mean(x) - 1.0) < 0.005);
    const std::vector<double> head(x.begin(), x.begin() + 100000);
    CHECK(ts::ks_one_sample(head, [](double v) { return -std::expm1(-v); }) <
          ts::ks_coefficient(0.001) / std::sqrt(1e5));

    const auto y = draw_exponential(ctx, 2.0, 200000);
    CHECK(std::fabs(ts::mean(y) - 0.5) < 4.0 * 0.5 / std::sqrt(2e5));
    CHECK(draw_exponential(ctx, 2.0, 0).empty());
    CHECK_THROWS_AS(draw_exponential(ctx, 0.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(draw_exponential(ctx, -1.0, 5), std::invalid_argument);
}

TEST_CASE("adjacent streams are uncorrelated") {
    SeedContext a = derive_stream(42, 0);
    SeedContext b = derive_stream(42, 1);
    const auto x = draw_normal(a, 200000);
    const auto y = draw_normal(b, 200000);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    CHECK(std::fabs(s / x.size()) < 4.0 / std::sqrt(2e5));
}
