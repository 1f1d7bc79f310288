#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <sstream>

#include "oracles.hpp"
#include "spdc/counting.hpp"
#include "spdc/errors.hpp"

using namespace spdc;

namespace {
SourceConfig lossy_source()
{
    SourceConfig s;
    s.pair_rate = 1e5;
    s.background_rates = {5e4, 2e4};
    s.efficiencies = {0.8, 0.6};
    s.jitter_sigma_ps = 50.0;
    s.duration_s = 2.0;
    s.seed = 77;
    return s;
}

TimeTagStream hand_stream()
{
    TimeTagStream s;
    s.duration_ps = 100000;
    s.events = {{2, 9500}, {1, 10000}, {2, 10499}, {2, 10500}, {1, 20000}, {2, 20000}, {2, 30000}};
    return s;
}

bool within_sigmas(double observed, double expected, double k)
{
    return std::abs(observed - expected) <= k * std::sqrt(expected);
}
}  // namespace

TEST_CASE("synthesis is deterministic per seed")
{
    auto cfg = lossy_source();
    cfg.duration_s = 0.05;
    auto const a = synthesize_stream(cfg);
    auto const b = synthesize_stream(cfg);
    CHECK(a.events == b.events);
    cfg.seed += 1;
    CHECK_FALSE(synthesize_stream(cfg).events == a.events);
}

TEST_CASE("synthesized stream is ordered, bounded and well-formed")
{
    auto cfg = lossy_source();
    cfg.duration_s = 0.1;
    auto const s = synthesize_stream(cfg);
    CHECK_NOTHROW(s.validate());
    CHECK(s.duration_ps == 100'000'000'000);
    CHECK(std::is_sorted(s.events.begin(), s.events.end(), [](TimeTag const& x, TimeTag const& y) {
        return std::pair(x.timestamp_ps, x.channel) < std::pair(y.timestamp_ps, y.channel);
    }));
    for (auto const& e : s.events) {
        CHECK((e.channel == 1 || e.channel == 2));
        CHECK(e.timestamp_ps >= 0);
        CHECK(e.timestamp_ps < s.duration_ps);
    }
}

TEST_CASE("singles and coincidences agree with the Poisson model")
{
    auto const cfg = lossy_source();
    auto const m = measure(synthesize_stream(cfg), 1e-9);
    double const d = cfg.duration_s;
    // Each pair photon lands on either detector with probability 1/2.
    double const n1 = cfg.pair_rate * cfg.efficiencies[0] + cfg.background_rates[0];
    double const n2 = cfg.pair_rate * cfg.efficiencies[1] + cfg.background_rates[1];
    double const sigma_lag = std::sqrt(2.0) * cfg.jitter_sigma_ps;
    double const in_window = std::erf(500.0 / (sigma_lag * std::sqrt(2.0)));
    double const nc = 0.5 * cfg.pair_rate * cfg.efficiencies[0] * cfg.efficiencies[1] * in_window + n1 * n2 * 1e-9;
    CHECK(within_sigmas(static_cast<double>(m.counts_1), n1 * d, 5.0));
    CHECK(within_sigmas(static_cast<double>(m.counts_2), n2 * d, 5.0));
    CHECK(within_sigmas(static_cast<double>(m.counts_c), nc * d, 5.0));
}

TEST_CASE("summarize worked examples")
{
    auto const s = summarize(1e5, 1e5, 100.0, 1e-9);
    CHECK(s.accidentals == doctest::Approx(10.0));
    CHECK(s.real == doctest::Approx(90.0));
    CHECK(s.g2_zero == doctest::Approx(10.0));
    CHECK(s.car == doctest::Approx(9.0));

    auto const flat = summarize(2e5, 5e4, 10.0, 1e-9);
    CHECK(flat.g2_zero == doctest::Approx(1.0));
    CHECK(flat.car == doctest::Approx(0.0));

    auto const empty = summarize(0.0, 1e5, 0.0, 1e-9);
    CHECK(std::isnan(empty.g2_zero));
    CHECK(std::isnan(empty.car));
    CHECK_THROWS_AS(summarize(0.0, 1e5, 3.0, 1e-9), NumericalError);
    CHECK_THROWS_AS(summarize(1.0, 1.0, 1.0, 0.0), ConfigError);
}

TEST_CASE("coincidence window is half-open")
{
    // Lags t2 - t1: -500, 499, 500 around the first channel-1 event, 0 at the second.
    CHECK(count_coincidences(hand_stream(), 1e-9) == 3);
    CHECK(count_coincidences(hand_stream(), 0.5e-9) == 1);
}

TEST_CASE("histogram bins lags by nearest centre")
{
    auto const h = coincidence_histogram(hand_stream(), 100.0, 1000.0, 0.0);
    REQUIRE(h.lag_ps.size() == 21);
    auto bin = [&](double lag) { return h.counts[static_cast<Eigen::Index>((lag + 1000.0) / 100.0)]; };
    CHECK(bin(-500.0) == 1.0);
    CHECK(bin(0.0) == 1.0);
    CHECK(bin(500.0) == 2.0);
    CHECK(h.counts.sum() == 4.0);
}

TEST_CASE("histogram floor matches accidentals for a synthetic run")
{
    auto const cfg = lossy_source();
    auto const s = synthesize_stream(cfg);
    auto const h = coincidence_histogram(s, 50.0, 5000.0);
    CHECK(h.exclusion_ps >= 5.0 * std::sqrt(2.0) * cfg.jitter_sigma_ps);
    CHECK(std::abs(h.floor - h.expected_floor) < 5.0 * h.floor_stderr);
    CHECK(h.g2[h.g2.size() / 2] > 100.0);
}

TEST_CASE("time-tag files round trip")
{
    auto cfg = lossy_source();
    cfg.duration_s = 0.01;
    auto const s = synthesize_stream(cfg);

    std::stringstream csv;
    write_timetags_csv(csv, s);
    CHECK(csv.str().rfind("# columns:", 0) == 0);
    auto const c = read_timetags_csv(csv);
    CHECK(c.events == s.events);
    CHECK(c.duration_ps == s.duration_ps);

    std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
    write_timetags_binary(bin, s);
    CHECK(bin.str().size() == 9 * s.events.size());
    auto const b = read_timetags_binary(bin);
    CHECK(b.events == s.events);
}

TEST_CASE("malformed time-tag input is rejected")
{
    std::istringstream bad_channel("3,100\n");
    CHECK_THROWS_AS(read_timetags_csv(bad_channel), ConfigError);
    std::istringstream unsorted("1,200\n2,100\n");
    CHECK_THROWS_AS(read_timetags_csv(unsorted), ConfigError);
    std::istringstream junk("1;100\n");
    CHECK_THROWS_AS(read_timetags_csv(junk), ConfigError);
    std::istringstream truncated(std::string("\x01\x00\x00", 3));
    CHECK_THROWS_AS(read_timetags_binary(truncated), ConfigError);
}

TEST_CASE("power-law fit")
{
    Eigen::ArrayXd x(5);
    x << 0.25, 0.5, 1.0, 2.0, 4.0;
    Eigen::ArrayXd const y = 3.0 * x.square();
    auto const f = fit_power_law(x, y);
    CHECK(f.exponent == doctest::Approx(2.0));
    CHECK(f.prefactor == doctest::Approx(3.0));
    CHECK(f.exponent_stderr == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("power sweep scales rates and offsets seeds")
{
    auto base = lossy_source();
    base.duration_s = 0.05;
    auto const sweep = power_sweep(base, 1.0, {0.5, 2.0});
    REQUIRE(sweep.size() == 2);
    auto scaled = base;
    scaled.pair_rate *= 2.0;
    scaled.background_rates[0] *= 2.0;
    scaled.background_rates[1] *= 2.0;
    scaled.seed = base.seed + 1;
    auto const direct = measure(synthesize_stream(scaled));
    CHECK(sweep[1].measurement.counts_c == direct.counts_c);
    CHECK(sweep[1].measurement.counts_1 == direct.counts_1);
}

TEST_CASE("invalid sources are rejected")
{
    auto s = lossy_source();
    s.efficiencies[0] = 1.5;
    CHECK_THROWS_AS(synthesize_stream(s), ConfigError);
    s = lossy_source();
    s.duration_s = 0.0;
    CHECK_THROWS_AS(synthesize_stream(s), ConfigError);
}
