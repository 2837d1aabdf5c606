#include <catch2/catch.hpp>

#include <cmath>

#include "agsim/link.hpp"

using agsim::ErrorModelParams;
using agsim::RngStream;

TEST_CASE("logistic error curve anchors") {
  ErrorModelParams params;  // mid 12 dB, steepness 1.5 dB
  REQUIRE(agsim::packet_error_rate(12.0, params) == 0.5);
  REQUIRE(agsim::packet_error_rate(12.0 + 3.0 * 1.5, params) ==
          Approx(1.0 / (1.0 + std::exp(3.0))).epsilon(1e-12));
  REQUIRE(agsim::packet_error_rate(12.0 + 3000.0, params) == 0.0);
  REQUIRE(agsim::packet_error_rate(12.0 - 3000.0, params) == 1.0);
}

TEST_CASE("error curve is strictly decreasing in snr") {
  ErrorModelParams params;
  double prev = agsim::packet_error_rate(-30.0, params);
  for (double snr = -25.0; snr <= 50.0; snr += 5.0) {
    const double per = agsim::packet_error_rate(snr, params);
    REQUIRE(per < prev);
    REQUIRE(per >= 0.0);
    REQUIRE(per <= 1.0);
    prev = per;
  }
}

TEST_CASE("airtime arithmetic") {
  REQUIRE(agsim::airtime_s(1024, 1e8, 0.0) == 8.0 * 1024 / 1e8);  // 81.92 us
  REQUIRE(agsim::airtime_s(2048, 1e8, 0.0) == 2.0 * agsim::airtime_s(1024, 1e8, 0.0));
  REQUIRE(agsim::airtime_s(1024, 150e6, 100e-6) ==
          Approx(100e-6 + 8.0 * 1024 / 150e6).epsilon(1e-12));
  REQUIRE_THROWS_AS(agsim::airtime_s(0, 1e8, 100e-6), std::domain_error);
  REQUIRE_THROWS_AS(agsim::airtime_s(1024, 0.0, 0.0), std::domain_error);
  REQUIRE_THROWS_AS(agsim::airtime_s(1024, 1e8, -1e-6), std::domain_error);
}

TEST_CASE("error-free limit delivers on the first attempt") {
  ErrorModelParams params;
  RngStream stream(1, 1);
  const auto outcome =
      agsim::transmit(1024, params.snr_mid_db + 3000.0, params, 1e8, 0.0, stream);
  REQUIRE(outcome.delivered);
  REQUIRE(outcome.attempts == 1);
  REQUIRE(outcome.airtime_s == agsim::airtime_s(1024, 1e8, 0.0));
}

TEST_CASE("always-fail limit exhausts every retry") {
  ErrorModelParams params;
  params.max_retries = 7;
  RngStream stream(1, 1);
  const auto outcome =
      agsim::transmit(1024, params.snr_mid_db - 3000.0, params, 1e8, 0.0, stream);
  REQUIRE_FALSE(outcome.delivered);
  REQUIRE(outcome.attempts == 8);
  REQUIRE(outcome.airtime_s == Approx(8.0 * agsim::airtime_s(1024, 1e8, 0.0)));
}

TEST_CASE("identical stream state gives identical outcomes") {
  ErrorModelParams params;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RngStream a(seed, 1), b(seed, 1);
    const auto lhs = agsim::transmit(1024, 12.5, params, 1e8, 50e-6, a);
    const auto rhs = agsim::transmit(1024, 12.5, params, 1e8, 50e-6, b);
    REQUIRE(lhs.attempts == rhs.attempts);
    REQUIRE(lhs.delivered == rhs.delivered);
    REQUIRE(lhs.airtime_s == rhs.airtime_s);
  }
}

namespace {

// snr giving PER == p on the logistic curve: snr = mid + s*ln((1-p)/p).
double snr_for_per(double p, const ErrorModelParams& params) {
  return params.snr_mid_db +
         params.steepness_db * std::log((1.0 - p) / p);
}

}  // namespace

TEST_CASE("delivery ratio matches 1 - p^(R+1)") {
  ErrorModelParams params;
  params.max_retries = 7;
  for (double p : {0.1, 0.5, 0.9}) {
    const double snr = snr_for_per(p, params);
    const double per = agsim::packet_error_rate(snr, params);
    REQUIRE(per == Approx(p).epsilon(1e-9));

    RngStream stream(99, 1);
    const int n = 100'000;
    int delivered = 0;
    long attempts = 0;
    for (int i = 0; i < n; ++i) {
      const auto outcome = agsim::transmit(1024, snr, params, 1e8, 0.0, stream);
      delivered += outcome.delivered ? 1 : 0;
      attempts += outcome.attempts;
    }
    const double expect_delivery = 1.0 - std::pow(per, 8.0);
    REQUIRE(static_cast<double>(delivered) / n ==
            Approx(expect_delivery).margin(0.01));

    // Expected attempts for a geometric retry chain truncated at R+1.
    const double expect_attempts = (1.0 - std::pow(per, 8.0)) / (1.0 - per);
    REQUIRE(static_cast<double>(attempts) / n ==
            Approx(expect_attempts).epsilon(0.02));
  }
}

TEST_CASE("closed-form delivery probability is monotone in snr") {
  ErrorModelParams params;
  double prev = 0.0;
  for (double snr = -10.0; snr <= 40.0; snr += 1.0) {
    const double per = agsim::packet_error_rate(snr, params);
    const double delivery = 1.0 - std::pow(per, params.max_retries + 1);
    REQUIRE(delivery >= prev);
    prev = delivery;
  }
}

TEST_CASE("delivered airtime is at least one attempt") {
  ErrorModelParams params;
  RngStream stream(7, 1);
  const double single = agsim::airtime_s(1024, 1e8, 10e-6);
  for (int i = 0; i < 1000; ++i) {
    const auto outcome = agsim::transmit(1024, 12.0, params, 1e8, 10e-6, stream);
    REQUIRE(outcome.airtime_s >= single);
    REQUIRE(outcome.attempts >= 1);
    REQUIRE(outcome.attempts <= params.max_retries + 1);
  }
}
