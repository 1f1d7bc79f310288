#include "spdc/counting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include <Eigen/LU>
#include <Eigen/QR>

#include "spdc/errors.hpp"
#include "spdc/random.hpp"

namespace spdc {

void SourceConfig::validate() const
{
    auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (!finite_nonneg(pair_rate) || !finite_nonneg(background_rates[0]) || !finite_nonneg(background_rates[1]))
        throw ConfigError("source: rates must be finite and >= 0");
    for (double eta : efficiencies) {
        if (!(eta >= 0.0 && eta <= 1.0))
            throw ConfigError("source: efficiencies must lie in [0, 1]");
    }
    if (!finite_nonneg(jitter_sigma_ps))
        throw ConfigError("source: jitter_sigma_ps must be >= 0");
    if (!(duration_s > 0.0) || !std::isfinite(duration_s) || duration_s * 1e12 > 9e18)
        throw ConfigError("source: duration_s must be positive and representable in ps");
}

void TimeTagStream::validate() const
{
    if (duration_ps <= 0)
        throw ConfigError("time-tag stream: duration must be positive");
    for (std::size_t j = 0; j < events.size(); ++j) {
        auto const& e = events[j];
        if (e.channel != 1 && e.channel != 2)
            throw ConfigError("time-tag stream: channel must be 1 or 2");
        if (e.timestamp_ps < 0)
            throw ConfigError("time-tag stream: negative timestamp");
        if (j > 0 && e.timestamp_ps < events[j - 1].timestamp_ps)
            throw ConfigError("time-tag stream: timestamps must be nondecreasing");
    }
}

std::array<std::size_t, 2> TimeTagStream::singles() const
{
    std::array<std::size_t, 2> n{0, 0};
    for (auto const& e : events)
        ++n[e.channel - 1];
    return n;
}

TimeTagStream synthesize_stream(SourceConfig const& config)
{
    config.validate();
    TimeTagStream stream;
    stream.source = config;
    stream.duration_ps = static_cast<std::int64_t>(std::llround(config.duration_s * 1e12));
    double const duration_ps = static_cast<double>(stream.duration_ps);
    Rng rng(config.seed);

    auto push = [&](std::uint8_t channel, double t_ps) {
        if (t_ps < 0.0 || t_ps >= duration_ps)
            return;
        auto const ts = static_cast<std::int64_t>(std::floor(t_ps));
        stream.events.push_back({channel, ts});
    };

    if (config.pair_rate > 0.0) {
        double const rate_per_ps = config.pair_rate * 1e-12;
        double t = rng.exponential(rate_per_ps);
        while (t < duration_ps) {
            for (int photon = 0; photon < 2; ++photon) {
                // Draw every variate unconditionally so the sequence depends
                // only on the seed and the number of pairs.
                std::uint8_t const channel = rng.bernoulli(0.5) ? 1 : 2;
                bool const detected = rng.bernoulli(config.efficiencies[channel - 1]);
                double const jitter = config.jitter_sigma_ps * rng.normal();
                if (detected)
                    push(channel, t + jitter);
            }
            t += rng.exponential(rate_per_ps);
        }
    }
    for (std::uint8_t channel = 1; channel <= 2; ++channel) {
        double const rate = config.background_rates[channel - 1];
        if (!(rate > 0.0))
            continue;
        double const rate_per_ps = rate * 1e-12;
        for (double t = rng.exponential(rate_per_ps); t < duration_ps; t += rng.exponential(rate_per_ps))
            push(channel, t);
    }

    std::sort(stream.events.begin(), stream.events.end(), [](TimeTag const& a, TimeTag const& b) {
        return a.timestamp_ps != b.timestamp_ps ? a.timestamp_ps < b.timestamp_ps : a.channel < b.channel;
    });
    return stream;
}

CountSummary summarize(double singles_1, double singles_2, double coincidences, double window_s)
{
    if (!(window_s > 0.0) || !std::isfinite(window_s))
        throw ConfigError("summarize: coincidence window must be positive");
    if (!(singles_1 >= 0.0) || !(singles_2 >= 0.0) || !(coincidences >= 0.0))
        throw ConfigError("summarize: rates must be >= 0");
    CountSummary s;
    s.singles_1 = singles_1;
    s.singles_2 = singles_2;
    s.coincidences = coincidences;
    s.window_s = window_s;
    s.accidentals = singles_1 * singles_2 * window_s;
    s.real = coincidences - s.accidentals;
    if (s.accidentals > 0.0) {
        s.g2_zero = coincidences / s.accidentals;
        s.car = s.g2_zero - 1.0;
    } else if (coincidences > 0.0) {
        throw NumericalError("summarize: g2 undefined, coincidences observed with zero accidental rate");
    } else {
        s.g2_zero = std::numeric_limits<double>::quiet_NaN();
        s.car = std::numeric_limits<double>::quiet_NaN();
    }
    return s;
}

namespace {

struct ChannelTimes
{
    std::vector<std::int64_t> ch1;
    std::vector<std::int64_t> ch2;
};

ChannelTimes split_channels(TimeTagStream const& stream)
{
    ChannelTimes out;
    auto const n = stream.singles();
    out.ch1.reserve(n[0]);
    out.ch2.reserve(n[1]);
    for (auto const& e : stream.events)
        (e.channel == 1 ? out.ch1 : out.ch2).push_back(e.timestamp_ps);
    return out;
}

// Calls visit(lag) for every t2 - t1 in [lo, hi).
template <typename Visit>
void for_each_lag(ChannelTimes const& times, double lo, double hi, Visit&& visit)
{
    std::size_t first = 0;
    for (auto const t1 : times.ch1) {
        double const a = static_cast<double>(t1);
        while (first < times.ch2.size() && static_cast<double>(times.ch2[first]) - a < lo)
            ++first;
        for (std::size_t j = first; j < times.ch2.size(); ++j) {
            double const lag = static_cast<double>(times.ch2[j]) - a;
            if (lag >= hi)
                break;
            visit(lag);
        }
    }
}

}  // namespace

std::size_t count_coincidences(TimeTagStream const& stream, double window_s)
{
    if (!(window_s > 0.0))
        throw ConfigError("count_coincidences: window must be positive");
    // Snap to 1e-6 ps so that e.g. 1e-9 s gives exactly 500 ps either side.
    double const half = 0.5 * std::round(window_s * 1e18) / 1e6;
    std::size_t n = 0;
    for_each_lag(split_channels(stream), -half, half, [&](double) { ++n; });
    return n;
}

CountMeasurement measure(TimeTagStream const& stream, double window_s)
{
    stream.validate();
    CountMeasurement m;
    auto const n = stream.singles();
    m.counts_1 = n[0];
    m.counts_2 = n[1];
    m.counts_c = count_coincidences(stream, window_s);
    double const d = stream.duration_s();
    m.summary = summarize(m.counts_1 / d, m.counts_2 / d, m.counts_c / d, window_s);
    if (m.summary.accidentals > 0.0) {
        if (m.counts_c > 0) {
            m.g2_stderr = m.summary.g2_zero *
                          std::sqrt(1.0 / m.counts_c + 1.0 / m.counts_1 + 1.0 / m.counts_2);
        } else {
            m.g2_stderr = 1.0 / (m.summary.accidentals * d);
        }
    } else {
        m.g2_stderr = std::numeric_limits<double>::quiet_NaN();
    }
    return m;
}

CorrelationHistogram coincidence_histogram(TimeTagStream const& stream, double bin_width_ps, double max_lag_ps,
                                           double exclusion_ps)
{
    if (!(bin_width_ps > 0.0))
        throw ConfigError("coincidence_histogram: bin width must be positive");
    if (!(max_lag_ps >= bin_width_ps))
        throw ConfigError("coincidence_histogram: max lag must be at least one bin");
    if (!(exclusion_ps >= 0.0))
        throw ConfigError("coincidence_histogram: exclusion radius must be >= 0");
    stream.validate();
    if (stream.events.empty())
        throw ConfigError("coincidence_histogram: empty stream");

    auto const half_bins = static_cast<Eigen::Index>(std::floor(max_lag_ps / bin_width_ps));
    Eigen::Index const nbins = 2 * half_bins + 1;
    double const lo = -(static_cast<double>(half_bins) + 0.5) * bin_width_ps;
    double const hi = -lo;

    CorrelationHistogram h;
    h.bin_width_ps = bin_width_ps;
    h.exclusion_ps = exclusion_ps;
    h.lag_ps = Eigen::ArrayXd::LinSpaced(nbins, static_cast<double>(-half_bins), static_cast<double>(half_bins)) *
               bin_width_ps;
    h.counts = Eigen::ArrayXd::Zero(nbins);
    for_each_lag(split_channels(stream), lo, hi, [&](double lag) {
        auto k = static_cast<Eigen::Index>(std::floor((lag - lo) / bin_width_ps));
        h.counts[std::clamp<Eigen::Index>(k, 0, nbins - 1)] += 1.0;
    });

    double sum = 0.0;
    Eigen::Index n = 0;
    for (Eigen::Index k = 0; k < nbins; ++k) {
        if (std::abs(h.lag_ps[k]) > exclusion_ps) {
            sum += h.counts[k];
            ++n;
        }
    }
    if (n == 0)
        throw ConfigError("coincidence_histogram: no bins beyond the exclusion radius; increase max_lag");
    h.floor = sum / static_cast<double>(n);
    h.floor_stderr = std::sqrt(h.floor / static_cast<double>(n));
    auto const singles = stream.singles();
    double const d = stream.duration_s();
    h.expected_floor = (singles[0] / d) * (singles[1] / d) * bin_width_ps * 1e-12 * d;
    if (!(h.floor > 0.0))
        throw NumericalError("coincidence_histogram: accidental floor is zero; g2 undefined");
    h.g2 = h.counts / h.floor;
    return h;
}

CorrelationHistogram coincidence_histogram(TimeTagStream const& stream, double bin_width_ps, double max_lag_ps)
{
    double const combined = std::sqrt(2.0) * stream.source.jitter_sigma_ps;
    return coincidence_histogram(stream, bin_width_ps, max_lag_ps, std::max(5.0 * combined, 0.5 * bin_width_ps));
}

std::vector<SweepPoint> power_sweep(SourceConfig const& base, double reference_power,
                                    std::vector<double> const& powers, double window_s)
{
    base.validate();
    if (!(reference_power > 0.0))
        throw ConfigError("power_sweep: reference power must be positive");
    std::vector<SweepPoint> out;
    out.reserve(powers.size());
    for (std::size_t j = 0; j < powers.size(); ++j) {
        double const p = powers[j];
        if (!(p > 0.0) || !std::isfinite(p))
            throw ConfigError("power_sweep: powers must be positive");
        double const scale = p / reference_power;
        SourceConfig config = base;
        config.pair_rate *= scale;
        config.background_rates[0] *= scale;
        config.background_rates[1] *= scale;
        config.seed = base.seed + j;
        out.push_back({p, measure(synthesize_stream(config), window_s)});
    }
    return out;
}

PowerLawFit fit_power_law(Eigen::Ref<Eigen::ArrayXd const> const& x, Eigen::Ref<Eigen::ArrayXd const> const& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw ConfigError("fit_power_law: need at least two (x, y) pairs of equal length");
    if ((x <= 0.0).any() || (y <= 0.0).any())
        throw NumericalError("fit_power_law: values must be positive");
    Eigen::Index const n = x.size();
    Eigen::MatrixXd a(n, 2);
    a.col(0).setOnes();
    a.col(1) = x.log().matrix();
    Eigen::VectorXd const b = y.log().matrix();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < 2)
        throw NumericalError("fit_power_law: x values are not distinct");
    Eigen::VectorXd const coef = qr.solve(b);

    PowerLawFit fit;
    fit.prefactor = std::exp(coef[0]);
    fit.exponent = coef[1];
    if (n > 2) {
        double const s2 = (a * coef - b).squaredNorm() / static_cast<double>(n - 2);
        Eigen::Matrix2d const cov = (a.transpose() * a).inverse() * s2;
        fit.exponent_stderr = std::sqrt(cov(1, 1));
    }
    return fit;
}

void write_timetags_csv(std::ostream& out, TimeTagStream const& stream)
{
    out << "# columns: channel,timestamp_ps\n";
    out << "# duration_ps=" << stream.duration_ps << '\n';
    out << "channel,timestamp_ps\n";
    for (auto const& e : stream.events)
        out << static_cast<int>(e.channel) << ',' << e.timestamp_ps << '\n';
}

void write_timetags_binary(std::ostream& out, TimeTagStream const& stream)
{
    char record[9];
    for (auto const& e : stream.events) {
        record[0] = static_cast<char>(e.channel);
        auto const t = static_cast<std::uint64_t>(e.timestamp_ps);
        for (int b = 0; b < 8; ++b)
            record[1 + b] = static_cast<char>((t >> (8 * b)) & 0xffu);
        out.write(record, sizeof record);
    }
}

namespace {

TimeTagStream finish_read(std::vector<TimeTag> events, std::int64_t duration_ps = 0)
{
    TimeTagStream stream;
    stream.events = std::move(events);
    std::int64_t const last = stream.events.empty() ? 0 : stream.events.back().timestamp_ps + 1;
    stream.duration_ps = std::max<std::int64_t>({duration_ps, last, 1});
    stream.validate();
    return stream;
}

}  // namespace

TimeTagStream read_timetags_csv(std::istream& in)
{
    std::vector<TimeTag> events;
    std::int64_t duration_ps = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.rfind("# duration_ps=", 0) == 0) {
            duration_ps = std::atoll(line.c_str() + 14);
            continue;
        }
        if (line.empty() || line[0] == '#')
            continue;
        if (events.empty() && line == "channel,timestamp_ps")
            continue;
        int channel = 0;
        long long ts = 0;
        int consumed = 0;
        if (std::sscanf(line.c_str(), "%d,%lld%n", &channel, &ts, &consumed) != 2 ||
            static_cast<std::size_t>(consumed) != line.size())
            throw ConfigError("time-tag csv line " + std::to_string(lineno) + ": expected 'channel,timestamp_ps'");
        if (channel != 1 && channel != 2)
            throw ConfigError("time-tag csv line " + std::to_string(lineno) + ": channel must be 1 or 2");
        events.push_back({static_cast<std::uint8_t>(channel), ts});
    }
    return finish_read(std::move(events), duration_ps);
}

TimeTagStream read_timetags_binary(std::istream& in)
{
    std::vector<TimeTag> events;
    unsigned char record[9];
    while (true) {
        in.read(reinterpret_cast<char*>(record), sizeof record);
        auto const got = in.gcount();
        if (got == 0)
            break;
        if (got != static_cast<std::streamsize>(sizeof record))
            throw ConfigError("time-tag binary: truncated record");
        std::uint64_t t = 0;
        for (int b = 7; b >= 0; --b)
            t = (t << 8) | record[1 + b];
        if (t > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
            throw ConfigError("time-tag binary: timestamp out of range");
        events.push_back({record[0], static_cast<std::int64_t>(t)});
    }
    return finish_read(std::move(events));
}

void write_histogram_csv(std::ostream& out, CorrelationHistogram const& h)
{
    char buf[128];
    out << "# columns: lag_ps,counts,g2\n";
    std::snprintf(buf, sizeof buf, "# bin_width_ps=%.6g floor=%.10g floor_stderr=%.6g exclusion_ps=%.6g\n",
                  h.bin_width_ps, h.floor, h.floor_stderr, h.exclusion_ps);
    out << buf;
    out << "lag_ps,counts,g2\n";
    for (Eigen::Index k = 0; k < h.counts.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.10g,%.0f,%.10g\n", h.lag_ps[k], h.counts[k], h.g2[k]);
        out << buf;
    }
}

}  // namespace spdc
