// Copyright 2026 The bwsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>

#include <doctest.h>

#include "bwsim/channel.h"

namespace bwsim {
namespace {

TEST_SUITE("channel") {

TEST_CASE("OFDM budget for the default 7 MHz profile") {
  // fs = floor(8/7 * 7e6 / 8000) * 8000 = 8 MHz, Tb = 256 / fs = 32 us,
  // Ts = 1.125 * Tb = 36 us, 5 ms / 36 us = 138.9 -> 138 symbols.
  // 192 carriers * 6 bits * 3/4 / 8 = 108 bytes per symbol.
  PhyProfile phy;
  CHECK(ofdm_symbols_per_frame(phy) == 138);
  const auto caps = subframe_capacities(phy);
  CHECK(caps.dl == 7452);
  CHECK(caps.ul == 7452 - 8 * 108);
}

TEST_CASE("even split before the contention region") {
  PhyProfile phy;
  phy.contention_slots_per_frame = 0;
  const auto caps = subframe_capacities(phy);
  CHECK(std::abs(caps.dl - caps.ul) <= 1);
  CHECK(caps.dl + caps.ul == 14904);
}

TEST_CASE("explicit capacities pass through") {
  PhyProfile phy;
  phy.dl_capacity = 7000;
  phy.ul_capacity = 7000;
  const auto caps = subframe_capacities(phy);
  CHECK(caps.dl == 7000);
  CHECK(caps.ul == 7000);
}

TEST_CASE("bad PHY settings are rejected") {
  PhyProfile phy;
  phy.dl_fraction = 1.0;
  CHECK_THROWS_AS(subframe_capacities(phy), ConfigError);
  phy.dl_fraction = 0.0;
  CHECK_THROWS_AS(subframe_capacities(phy), ConfigError);
  phy = PhyProfile{};
  phy.contention_slots_per_frame = 100;  // eats the whole UL subframe
  CHECK_THROWS_AS(subframe_capacities(phy), ConfigError);
  phy = PhyProfile{};
  phy.channel_bandwidth_hz = 0.0;
  CHECK_THROWS_AS(ofdm_symbols_per_frame(phy), ConfigError);
}

TEST_CASE("steady state of the two-state chain") {
  auto s = steady_state(0.5, 0.5);
  CHECK(s.good == doctest::Approx(0.5));
  CHECK(s.bad == doctest::Approx(0.5));
  s = steady_state(0.25, 0.75);
  CHECK(s.good == doctest::Approx(0.75));
  CHECK(s.bad == doctest::Approx(0.25));
  for (double p : {0.01, 0.3, 0.9}) {
    s = steady_state(p, p);
    CHECK(s.good == doctest::Approx(0.5));
  }
  CHECK_THROWS_AS(steady_state(0.0, 0.0), ConfigError);
  CHECK_THROWS_AS(steady_state(1.5, 0.5), ConfigError);
}

TEST_CASE("average loss") {
  CHECK(average_loss(0.0, 0.2, 0.5, 0.5) == doctest::Approx(0.1));
  CHECK(average_loss(0.0, 0.0, 0.3, 0.7) == 0.0);
  for (double pi : {0.1, 0.5, 0.9}) {
    CHECK(average_loss(0.07, 0.07, pi, 1.0 - pi) == doctest::Approx(0.07));
  }
}

TEST_CASE("ideal and certain-loss channels") {
  Rng rng(3);
  GilbertElliottChannel ideal({0.0, 0.0, 0.5, 0.5}, rng);
  GilbertElliottChannel dead({1.0, 1.0, 0.5, 0.5}, rng);
  const Transmission t{100, TransmissionKind::kDataPdu, 0, 1};
  int ok = 0;
  int lost = 0;
  for (int i = 0; i < 1000; ++i) {
    ok += ideal.transmit(t, rng);
    lost += !dead.transmit(t, rng);
  }
  CHECK(ok == 1000);
  CHECK(lost == 1000);
}

TEST_CASE("empirical loss matches the stationary formula") {
  const GilbertElliottParams params{0.0, 0.4, 0.5, 0.5};
  Rng rng(11);
  GilbertElliottChannel ch(params, rng);
  const int n = 1'000'000;
  int lost = 0;
  for (int i = 0; i < n; ++i) {
    lost += !ch.transmit({960, TransmissionKind::kDataPdu, 0, 1}, rng);
  }
  const double rate = static_cast<double>(lost) / n;
  CHECK(rate == doctest::Approx(0.20).epsilon(0.05));
  CHECK(std::abs(rate - params.loss_rate()) < 0.01);
}

TEST_CASE("losses come in bursts") {
  // Sticky chain: long runs in each state.
  const GilbertElliottParams params{0.0, 1.0, 0.01, 0.01};
  GilbertElliottChannel ch(params, GilbertElliottChannel::State::kGood);
  Rng rng(5);
  int runs = 0;
  int lost = 0;
  bool prev = false;
  for (int i = 0; i < 200'000; ++i) {
    const bool loss = !ch.transmit({100, TransmissionKind::kDataPdu, 0, 1}, rng);
    lost += loss;
    if (loss && !prev) ++runs;
    prev = loss;
  }
  // Mean burst length is 1 / p_bg = 100.
  CHECK(static_cast<double>(lost) / runs > 50.0);
}

TEST_CASE("parameter validation") {
  GilbertElliottParams p{0.0, 0.5, 0.0, 0.0};
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {-0.1, 0.5, 0.5, 0.5};
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {0.0, 0.5, 0.5, 0.5};
  CHECK_NOTHROW(p.validate());
  CHECK(p.loss_rate() == doctest::Approx(0.25));
}

}  // TEST_SUITE

}  // namespace
}  // namespace bwsim
