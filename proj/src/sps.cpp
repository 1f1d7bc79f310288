#include "spdc/sps.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include <Eigen/QR>

#include "spdc/errors.hpp"
#include "spdc/random.hpp"

namespace spdc {

void PairSpectrum::validate() const
{
    if (!(pump_wavelength_nm > 0.0))
        throw ConfigError("pair spectrum: pump wavelength must be positive");
    if (wavelength_nm.size() != density.size())
        throw ConfigError("pair spectrum: wavelength and density sizes differ");
    if (wavelength_nm.size() == 1)
        throw ConfigError("pair spectrum: a continuous part needs at least two nodes");
    for (Eigen::Index j = 1; j < wavelength_nm.size(); ++j) {
        if (!(wavelength_nm[j] > wavelength_nm[j - 1]))
            throw ConfigError("pair spectrum: wavelengths must be strictly ascending");
    }
    if (wavelength_nm.size() > 0 && !(wavelength_nm[0] > pump_wavelength_nm))
        throw ConfigError("pair spectrum: signal wavelengths must exceed the pump wavelength");
    if (!density.allFinite() || (density < 0.0).any())
        throw ConfigError("pair spectrum: density must be finite and >= 0");
    for (auto const& line : lines) {
        if (!(line.wavelength_nm > pump_wavelength_nm) || !(line.weight >= 0.0))
            throw ConfigError("pair spectrum: invalid discrete line");
    }
    if (wavelength_nm.size() == 0 && lines.empty())
        throw ConfigError("pair spectrum is empty");
}

double PairSpectrum::conjugate_nm(double wavelength) const
{
    return conjugate_wavelength_nm(pump_wavelength_nm, wavelength);
}

PairSpectrum gaussian_pair_spectrum(double pump_wavelength_nm, double center_nm, double fwhm_nm, Eigen::Index nodes)
{
    if (!(fwhm_nm > 0.0) || nodes < 3)
        throw ConfigError("gaussian_pair_spectrum: fwhm must be positive and nodes >= 3");
    PairSpectrum s;
    s.pump_wavelength_nm = pump_wavelength_nm;
    s.wavelength_nm = Eigen::ArrayXd::LinSpaced(nodes, center_nm - 3.0 * fwhm_nm, center_nm + 3.0 * fwhm_nm);
    double const sigma = fwhm_nm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
    s.density = (-0.5 * ((s.wavelength_nm - center_nm) / sigma).square()).exp();
    s.validate();
    return s;
}

void EfficiencyWindow::validate() const
{
    if (!(peak >= 0.0 && peak <= 1.0))
        throw ConfigError("efficiency window: peak must lie in [0, 1]");
    if (!(passband_max_nm > passband_min_nm))
        throw ConfigError("efficiency window: empty passband");
    switch (shape) {
    case Shape::flat:
        break;
    case Shape::gaussian:
        if (!(center_nm > 0.0) || !(fwhm_nm > 0.0))
            throw ConfigError("efficiency window: gaussian needs positive center_nm and fwhm_nm");
        break;
    case Shape::tabulated:
        if (table_wavelength_nm.size() < 2 || table_wavelength_nm.size() != table_efficiency.size())
            throw ConfigError("efficiency window: table needs at least two rows");
        for (Eigen::Index j = 1; j < table_wavelength_nm.size(); ++j) {
            if (!(table_wavelength_nm[j] > table_wavelength_nm[j - 1]))
                throw ConfigError("efficiency window: table wavelengths must be strictly ascending");
        }
        if ((table_efficiency < 0.0).any() || (table_efficiency > 1.0).any())
            throw ConfigError("efficiency window: table values must lie in [0, 1]");
        break;
    }
}

double EfficiencyWindow::single(double wavelength) const
{
    if (wavelength < passband_min_nm || wavelength > passband_max_nm)
        return 0.0;
    switch (shape) {
    case Shape::flat:
        return peak;
    case Shape::gaussian: {
        double const sigma = fwhm_nm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
        double const x = (wavelength - center_nm) / sigma;
        return peak * std::exp(-0.5 * x * x);
    }
    case Shape::tabulated: {
        auto const& x = table_wavelength_nm;
        Eigen::Index const n = x.size();
        if (wavelength < x[0] || wavelength > x[n - 1])
            return 0.0;
        auto const it = std::upper_bound(x.data(), x.data() + n, wavelength);
        Eigen::Index const hi = std::min<Eigen::Index>(it - x.data(), n - 1);
        Eigen::Index const lo = hi - 1;
        double const t = (wavelength - x[lo]) / (x[hi] - x[lo]);
        return peak * ((1.0 - t) * table_efficiency[lo] + t * table_efficiency[hi]);
    }
    }
    return 0.0;
}

EfficiencyWindow read_efficiency_csv(std::istream& in)
{
    std::vector<double> wl;
    std::vector<double> eff;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line[0] == '#')
            continue;
        if (line.rfind("wavelength_nm", 0) == 0)
            continue;
        double a = 0.0;
        double b = 0.0;
        int consumed = 0;
        if (std::sscanf(line.c_str(), "%lf,%lf%n", &a, &b, &consumed) != 2 ||
            static_cast<std::size_t>(consumed) != line.size())
            throw ConfigError("efficiency csv line " + std::to_string(lineno) + ": expected 'wavelength_nm,efficiency'");
        wl.push_back(a);
        eff.push_back(b);
    }
    EfficiencyWindow w;
    w.shape = EfficiencyWindow::Shape::tabulated;
    w.table_wavelength_nm = Eigen::Map<Eigen::ArrayXd>(wl.data(), static_cast<Eigen::Index>(wl.size()));
    w.table_efficiency = Eigen::Map<Eigen::ArrayXd>(eff.data(), static_cast<Eigen::Index>(eff.size()));
    w.validate();
    return w;
}

void SpsConfig::validate() const
{
    if (!fiber)
        throw ConfigError("sps: fiber material not set");
    if (!(fiber_length_m > 0.0))
        throw ConfigError("sps: fiber_length_m must be positive");
    if (!(jitter_sigma_ps >= 0.0))
        throw ConfigError("sps: jitter_sigma_ps must be >= 0");
    if (!(bin_width_ps > 0.0))
        throw ConfigError("sps: bin_width_ps must be positive");
    if (n_pairs == 0)
        throw ConfigError("sps: n_pairs must be positive");
}

double fiber_delay_ps(SpsConfig const& config, double wavelength_nm)
{
    return 1e12 * group_delay(*config.fiber, PolarizationAxis::ordinary, wavelength_nm, config.fiber_length_m);
}

namespace {

// Discrete distribution over trapezoid cells of the continuous part followed
// by the lines, all weighted by the pair efficiency.
struct PairSampler
{
    PairSpectrum const& spectrum;
    Eigen::ArrayXd node_weight;
    std::vector<double> cumulative;  // cells then lines
    std::vector<double> line_weight;

    PairSampler(PairSpectrum const& s, EfficiencyWindow const& eff) : spectrum(s)
    {
        Eigen::Index const n = s.wavelength_nm.size();
        node_weight.resize(n);
        for (Eigen::Index j = 0; j < n; ++j) {
            double const l = s.wavelength_nm[j];
            node_weight[j] = s.density[j] * eff.pair(l, s.conjugate_nm(l));
        }
        double total = 0.0;
        for (Eigen::Index j = 0; j + 1 < n; ++j) {
            total += 0.5 * (node_weight[j] + node_weight[j + 1]) * (s.wavelength_nm[j + 1] - s.wavelength_nm[j]);
            cumulative.push_back(total);
        }
        for (auto const& line : s.lines) {
            total += line.weight * eff.pair(line.wavelength_nm, s.conjugate_nm(line.wavelength_nm));
            cumulative.push_back(total);
        }
        if (!(total > 0.0))
            throw NumericalError("simulate_sps: spectrum has no weight inside the efficiency window");
    }

    double draw(Rng& rng) const
    {
        double const target = rng.uniform() * cumulative.back();
        auto const it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
        auto const k = static_cast<Eigen::Index>(std::min<std::size_t>(it - cumulative.begin(), cumulative.size() - 1));
        Eigen::Index const cells = spectrum.wavelength_nm.size() > 0 ? spectrum.wavelength_nm.size() - 1 : 0;
        if (k >= cells)
            return spectrum.lines[static_cast<std::size_t>(k - cells)].wavelength_nm;
        // Exact inversion of the linear density inside the cell.
        double const a = node_weight[k];
        double const b = node_weight[k + 1];
        double const u = rng.uniform();
        double x = u;
        if (std::abs(b - a) > 1e-12 * (a + b))
            x = (-a + std::sqrt(a * a + (b - a) * (a + b) * u)) / (b - a);
        return spectrum.wavelength_nm[k] + x * (spectrum.wavelength_nm[k + 1] - spectrum.wavelength_nm[k]);
    }
};

}  // namespace

DelayHistogram simulate_sps(PairSpectrum const& spectrum, EfficiencyWindow const& efficiency,
                            SpsConfig const& config)
{
    spectrum.validate();
    efficiency.validate();
    config.validate();

    // Range-check every wavelength that can be drawn and bound the delays.
    double dmin = 0.0;
    double dmax = 0.0;
    auto visit = [&](double l) {
        double const d = fiber_delay_ps(config, spectrum.conjugate_nm(l)) - fiber_delay_ps(config, l);
        dmin = std::min({dmin, d, -d});
        dmax = std::max({dmax, d, -d});
    };
    for (Eigen::Index j = 0; j < spectrum.wavelength_nm.size(); ++j)
        visit(spectrum.wavelength_nm[j]);
    for (auto const& line : spectrum.lines)
        visit(line.wavelength_nm);

    PairSampler const sampler(spectrum, efficiency);
    double const reach = std::max(dmax, -dmin) + 8.0 * std::sqrt(2.0) * config.jitter_sigma_ps;
    auto const half_bins = static_cast<Eigen::Index>(std::ceil(reach / config.bin_width_ps)) + 1;
    Eigen::Index const nbins = 2 * half_bins + 1;

    DelayHistogram h;
    h.bin_width_ps = config.bin_width_ps;
    h.delay_ps = Eigen::ArrayXd::LinSpaced(nbins, static_cast<double>(-half_bins), static_cast<double>(half_bins)) *
                 config.bin_width_ps;
    h.counts = Eigen::ArrayXd::Zero(nbins);
    double const lo = -(static_cast<double>(half_bins) + 0.5) * config.bin_width_ps;

    Rng rng(config.seed);
    for (std::uint64_t n = 0; n < config.n_pairs; ++n) {
        double const ls = sampler.draw(rng);
        double const li = spectrum.conjugate_nm(ls);
        bool const swap = rng.bernoulli(0.5);
        double const l1 = swap ? li : ls;
        double const l2 = swap ? ls : li;
        double const j1 = config.jitter_sigma_ps * rng.normal();
        double const j2 = config.jitter_sigma_ps * rng.normal();
        double const dt = (fiber_delay_ps(config, l2) + j2) - (fiber_delay_ps(config, l1) + j1);
        auto const k = static_cast<Eigen::Index>(std::floor((dt - lo) / config.bin_width_ps));
        if (k >= 0 && k < nbins) {
            h.counts[k] += 1.0;
            ++h.pairs_detected;
        }
    }
    return h;
}

std::vector<CalibrationPoint> model_calibration_points(SpsConfig const& config, double pump_wavelength_nm,
                                                       std::vector<double> const& wavelengths_nm)
{
    config.validate();
    std::vector<CalibrationPoint> points;
    for (double l : wavelengths_nm) {
        if (!(l > pump_wavelength_nm))
            throw ConfigError("calibration wavelength must exceed the pump wavelength");
        double const conj = conjugate_wavelength_nm(pump_wavelength_nm, l);
        points.push_back({l, fiber_delay_ps(config, conj) - fiber_delay_ps(config, l)});
    }
    return points;
}

namespace {

// Horner evaluation in the unscaled variable.
double cubic(Eigen::Vector4d const& c, double x)
{
    return c[0] + x * (c[1] + x * (c[2] + x * c[3]));
}

}  // namespace

double CalibrationCurve::wavelength_nm(double delay_ps) const
{
    return reference_nm + cubic(coefficients, delay_ps);
}

CalibrationCurve calibrate(std::vector<CalibrationPoint> const& input, double reference_nm)
{
    if (input.size() < 4)
        throw ConfigError("calibrate: a cubic needs at least four points");
    for (auto const& p : input) {
        if (!std::isfinite(p.wavelength_nm) || !std::isfinite(p.delay_ps))
            throw ConfigError("calibrate: non-finite calibration point");
    }
    // Canonical order makes the result independent of input order.
    std::vector<CalibrationPoint> points = input;
    std::sort(points.begin(), points.end(), [](auto const& a, auto const& b) {
        return a.delay_ps != b.delay_ps ? a.delay_ps < b.delay_ps : a.wavelength_nm < b.wavelength_nm;
    });

    auto const n = static_cast<Eigen::Index>(points.size());
    double const lo = points.front().delay_ps;
    double const hi = points.back().delay_ps;
    double const center = 0.5 * (lo + hi);
    double const scale = 0.5 * (hi - lo);
    if (!(scale > 0.0))
        throw NumericalError("calibrate: rank-deficient fit, all delays coincide");

    Eigen::MatrixXd a(n, 4);
    Eigen::VectorXd y(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        double const x = (points[r].delay_ps - center) / scale;
        a(r, 0) = 1.0;
        a(r, 1) = x;
        a(r, 2) = x * x;
        a(r, 3) = x * x * x;
        y[r] = points[r].wavelength_nm - reference_nm;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    qr.setThreshold(1e-10);
    if (qr.rank() < 4)
        throw NumericalError("calibrate: rank-deficient fit, need four distinct delays");
    Eigen::Vector4d const b = qr.solve(y);

    // Expand b(x) with x = (t - center)/scale into powers of t.
    double const s1 = 1.0 / scale;
    double const m = center;
    Eigen::Vector4d c;
    c[3] = b[3] * s1 * s1 * s1;
    c[2] = b[2] * s1 * s1 - 3.0 * b[3] * m * s1 * s1 * s1;
    c[1] = b[1] * s1 - 2.0 * b[2] * m * s1 * s1 + 3.0 * b[3] * m * m * s1 * s1 * s1;
    c[0] = b[0] - b[1] * m * s1 + b[2] * m * m * s1 * s1 - b[3] * m * m * m * s1 * s1 * s1;

    CalibrationCurve curve;
    curve.coefficients = c;
    curve.reference_nm = reference_nm;
    curve.span_lo_ps = lo;
    curve.span_hi_ps = hi;
    curve.points = points;
    curve.residual_rms_nm = std::sqrt((a * b - y).squaredNorm() / static_cast<double>(n));

    // Sign of the derivative over the span.
    int sign = 0;
    for (int k = 0; k <= 1000; ++k) {
        double const x = -1.0 + 2.0 * k / 1000.0;
        double const d = b[1] + 2.0 * b[2] * x + 3.0 * b[3] * x * x;
        int const s = (d > 0.0) - (d < 0.0);
        if (s == 0 || (sign != 0 && s != sign)) {
            curve.monotonic = false;
            break;
        }
        sign = s;
    }
    return curve;
}

ReconstructedSpectrum reconstruct_spectrum(DelayHistogram const& histogram, CalibrationCurve const& calibration)
{
    Eigen::Index const nbins = histogram.counts.size();
    if (nbins == 0 || histogram.delay_ps.size() != nbins)
        throw ConfigError("reconstruct_spectrum: malformed histogram");

    struct Bin
    {
        double lambda, width, counts;
    };
    std::vector<Bin> bins;
    ReconstructedSpectrum out;
    for (Eigen::Index k = 0; k < nbins; ++k) {
        double const e0 = histogram.edge_lo(k);
        double const e1 = histogram.edge_hi(k);
        if (!calibration.covers(e0) || !calibration.covers(e1)) {
            ++out.excluded_bins;
            out.excluded_counts += histogram.counts[k];
            continue;
        }
        double const width = std::abs(calibration.wavelength_nm(e1) - calibration.wavelength_nm(e0));
        if (!(width > 0.0))
            throw NumericalError("reconstruct_spectrum: calibration is stationary inside a bin");
        bins.push_back({calibration.wavelength_nm(histogram.delay_ps[k]), width, histogram.counts[k]});
    }
    if (bins.empty())
        throw ConfigError("reconstruct_spectrum: calibration span covers no histogram bin");
    std::sort(bins.begin(), bins.end(), [](Bin const& a, Bin const& b) { return a.lambda < b.lambda; });

    auto const n = static_cast<Eigen::Index>(bins.size());
    out.wavelength_nm.resize(n);
    out.density.resize(n);
    out.counts.resize(n);
    out.bin_width_nm.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        out.wavelength_nm[j] = bins[j].lambda;
        out.counts[j] = bins[j].counts;
        out.bin_width_nm[j] = bins[j].width;
        out.density[j] = bins[j].counts / bins[j].width;
    }
    return out;
}

double correlation_time(double spectral_width_hz)
{
    if (!(spectral_width_hz > 0.0))
        throw ConfigError("correlation_time: spectral width must be positive");
    return 1.0 / spectral_width_hz;
}

double bandwidth_hz(double width_nm, double center_nm)
{
    if (!(width_nm > 0.0) || !(center_nm > 0.0))
        throw ConfigError("bandwidth_hz: width and center must be positive");
    return speed_of_light * width_nm * 1e-9 / (center_nm * 1e-9 * center_nm * 1e-9);
}

void write_delay_histogram_csv(std::ostream& out, DelayHistogram const& h)
{
    char buf[96];
    out << "# columns: delay_ps,counts\n";
    std::snprintf(buf, sizeof buf, "# bin_width_ps=%.6g pairs_detected=%llu\n", h.bin_width_ps,
                  static_cast<unsigned long long>(h.pairs_detected));
    out << buf << "delay_ps,counts\n";
    for (Eigen::Index k = 0; k < h.counts.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.10g,%.0f\n", h.delay_ps[k], h.counts[k]);
        out << buf;
    }
}

void write_reconstructed_csv(std::ostream& out, ReconstructedSpectrum const& s)
{
    char buf[128];
    out << "# columns: wavelength_nm,density_counts_per_nm,counts,bin_width_nm\n";
    std::snprintf(buf, sizeof buf, "# excluded_bins=%zu excluded_counts=%.0f\n", s.excluded_bins, s.excluded_counts);
    out << buf << "wavelength_nm,density_counts_per_nm,counts,bin_width_nm\n";
    for (Eigen::Index j = 0; j < s.wavelength_nm.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.0f,%.10g\n", s.wavelength_nm[j], s.density[j], s.counts[j],
                      s.bin_width_nm[j]);
        out << buf;
    }
}

}  // namespace spdc
