#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

namespace spdc {

struct TimeTag
{
    std::uint8_t channel = 1;     // 1 or 2
    std::int64_t timestamp_ps = 0;

    friend bool operator==(TimeTag const&, TimeTag const&) = default;
};

// Parameters of a synthetic two-detector (HBT) run. Rates in 1/s, jitter in
// ps, duration in s.
struct SourceConfig
{
    double pair_rate = 0.0;
    std::array<double, 2> background_rates{0.0, 0.0};  // detected rates
    std::array<double, 2> efficiencies{1.0, 1.0};
    double jitter_sigma_ps = 0.0;
    double duration_s = 1.0;
    std::uint64_t seed = 1;

    void validate() const;
};

struct TimeTagStream
{
    std::vector<TimeTag> events;  // sorted by (timestamp, channel)
    std::int64_t duration_ps = 0;
    SourceConfig source;          // rates and seed used, when synthesized

    void validate() const;
    double duration_s() const { return static_cast<double>(duration_ps) * 1e-12; }
    std::array<std::size_t, 2> singles() const;
};

/*!
 * Poisson pair emission; each photon of a pair goes to channel 1 or 2 with
 * probability 1/2 and is detected with that channel's efficiency.
 * Independent Poisson backgrounds per channel. Gaussian jitter is added to
 * every pair photon; events jittered outside [0, duration) are dropped.
 * Random numbers come from mt19937_64 seeded with `seed`.
 */
TimeTagStream synthesize_stream(SourceConfig const& config);

// Singles, coincidence and accidental rates in 1/s, window in s.
struct CountSummary
{
    double singles_1 = 0.0;
    double singles_2 = 0.0;
    double coincidences = 0.0;
    double window_s = 0.0;
    double accidentals = 0.0;
    double real = 0.0;  // N_c - N_a, may be negative from noise
    double g2_zero = 0.0;
    double car = 0.0;
};

/// g2 and CAR are NaN when N_a = N_c = 0. Throws NumericalError when
/// N_a = 0 and N_c > 0.
CountSummary summarize(double singles_1, double singles_2, double coincidences, double window_s);

inline constexpr double default_coincidence_window_s = 1e-9;

/// Cross-channel pairs (t1 from channel 1, t2 from channel 2) with
/// t2 - t1 in [-window/2, window/2).
std::size_t count_coincidences(TimeTagStream const& stream, double window_s);

struct CountMeasurement
{
    std::size_t counts_1 = 0;
    std::size_t counts_2 = 0;
    std::size_t counts_c = 0;
    CountSummary summary;
    double g2_stderr = 0.0;  // Poisson errors on N_c and both singles
};

CountMeasurement measure(TimeTagStream const& stream, double window_s = default_coincidence_window_s);

struct CorrelationHistogram
{
    Eigen::ArrayXd lag_ps;  // bin centres
    Eigen::ArrayXd counts;
    Eigen::ArrayXd g2;      // counts / floor
    double bin_width_ps = 0.0;
    double floor = 0.0;     // mean count of bins beyond the exclusion radius
    double floor_stderr = 0.0;
    double exclusion_ps = 0.0;
    double expected_floor = 0.0;  // N1 N2 bin_width D from the singles
};

/*!
 * Histogram of t2 - t1 over all cross-channel pairs with |lag| <= max_lag.
 * Bin k is centred on k * bin_width. The accidental floor is the mean of the
 * bins whose centre lies farther than `exclusion_ps` from zero; by default
 * five times the combined jitter of the two channels.
 */
CorrelationHistogram coincidence_histogram(TimeTagStream const& stream, double bin_width_ps, double max_lag_ps,
                                           double exclusion_ps);
CorrelationHistogram coincidence_histogram(TimeTagStream const& stream, double bin_width_ps, double max_lag_ps);

struct SweepPoint
{
    double power = 0.0;
    CountMeasurement measurement;
};

/// Scales the pair and background rates of `base` linearly with power
/// relative to `reference_power`. Point j uses seed base.seed + j.
std::vector<SweepPoint> power_sweep(SourceConfig const& base, double reference_power,
                                    std::vector<double> const& powers,
                                    double window_s = default_coincidence_window_s);

struct PowerLawFit
{
    double exponent = 0.0;
    double prefactor = 0.0;
    double exponent_stderr = 0.0;
};

/// Least-squares fit of log y = log a + b log x.
PowerLawFit fit_power_law(Eigen::Ref<Eigen::ArrayXd const> const& x, Eigen::Ref<Eigen::ArrayXd const> const& y);

void write_timetags_csv(std::ostream& out, TimeTagStream const& stream);
void write_timetags_binary(std::ostream& out, TimeTagStream const& stream);

/// CSV restores the duration from its "# duration_ps=" line when present;
/// otherwise the duration is one picosecond past the last event.
TimeTagStream read_timetags_csv(std::istream& in);
TimeTagStream read_timetags_binary(std::istream& in);

void write_histogram_csv(std::ostream& out, CorrelationHistogram const& histogram);

}  // namespace spdc
