#include "spdc/set.hpp"

#include <algorithm>
#include <cmath>

#include "spdc/parallel.hpp"

namespace spdc {

namespace {

double fwhm_to_sigma(double fwhm)
{
    return fwhm / (2.0 * std::sqrt(2.0 * std::log(2.0)));
}

// Angular-frequency width of a wavelength interval at the given frequency.
double resolution_rad_per_s(double resolution_nm, double omega)
{
    double const lambda_nm = angular_frequency_to_wavelength_nm(omega);
    return 2.0 * pi * speed_of_light * resolution_nm * 1e-9 / (lambda_nm * 1e-9 * lambda_nm * 1e-9);
}

}  // namespace

void SetScanConfig::validate() const
{
    if (!(seed_min_nm > 0.0) || !(seed_max_nm > seed_min_nm))
        throw ConfigError("set: seed range must be positive and ascending");
    if (!(seed_step_nm > 0.0) || seed_step_nm > seed_max_nm - seed_min_nm)
        throw ConfigError("set: seed step must be positive and no larger than the range");
    if (!(resolution_nm >= 0.0) || !std::isfinite(resolution_nm))
        throw ConfigError("set: resolution must be >= 0");
    if (!(signal_span_hz > 0.0) || signal_nodes < 2)
        throw ConfigError("set: spectrometer window needs a positive span and at least two nodes");
    if (!(artifact_amplitude >= 0.0))
        throw ConfigError("set: artifact amplitude must be >= 0");
}

Eigen::ArrayXd SetScanConfig::seed_axis() const
{
    auto const steps = static_cast<Eigen::Index>(std::floor((seed_max_nm - seed_min_nm) / seed_step_nm + 1e-9));
    Eigen::ArrayXd omega(steps + 1);
    // Longest wavelength first gives ascending frequency.
    for (Eigen::Index j = 0; j <= steps; ++j)
        omega[j] = wavelength_nm_to_angular_frequency(seed_max_nm - static_cast<double>(j) * seed_step_nm);
    return omega;
}

Eigen::ArrayXd SetScanConfig::signal_axis(double pump_wavelength_nm) const
{
    auto const spec =
        seed_window_grid(pump_wavelength_nm, seed_min_nm, seed_max_nm, signal_span_hz, signal_nodes, 2);
    return spec.omega_s.nodes();
}

JointSpectralGrid apply_spectrometer(JointSpectralGrid const& truth, double resolution_nm)
{
    truth.validate();
    if (!(resolution_nm >= 0.0))
        throw ConfigError("apply_spectrometer: resolution must be >= 0");
    if (resolution_nm == 0.0)
        return truth;

    Eigen::Index const ns = truth.omega_s.size();
    Eigen::MatrixXd kernel(ns, ns);
    for (Eigen::Index r = 0; r < ns; ++r) {
        double const sigma = fwhm_to_sigma(resolution_rad_per_s(resolution_nm, truth.omega_s[r]));
        for (Eigen::Index q = 0; q < ns; ++q) {
            double const x = (truth.omega_s[q] - truth.omega_s[r]) / sigma;
            kernel(r, q) = std::exp(-0.5 * x * x);
        }
        kernel.row(r) /= kernel.row(r).sum();
    }
    JointSpectralGrid out = truth;
    out.intensity = (kernel * truth.intensity.matrix()).array();
    return out;
}

JointSpectralGrid simulate_set(SetScanConfig const& config, PumpConfig const& pump, CrystalConfig const& crystal)
{
    config.validate();
    JointSpectralGrid const truth =
        compute_jsi(pump, crystal, config.signal_axis(pump.center_wavelength_nm), config.seed_axis());
    JointSpectralGrid out = apply_spectrometer(truth, config.resolution_nm);

    if (config.shg_artifact && config.artifact_amplitude > 0.0) {
        double const peak = truth.intensity.maxCoeff();
        double const spacing = (out.omega_s[out.omega_s.size() - 1] - out.omega_s[0]) /
                               static_cast<double>(out.omega_s.size() - 1);
        Eigen::Index const ni = out.omega_i.size();
        parallel_for(ni, [&](std::ptrdiff_t c) {
            double const line = 2.0 * out.omega_i[c];
            double const sigma =
                std::max(fwhm_to_sigma(resolution_rad_per_s(config.resolution_nm, line)), spacing);
            for (Eigen::Index r = 0; r < out.omega_s.size(); ++r) {
                double const x = (out.omega_s[r] - line) / sigma;
                out.intensity(r, c) += config.artifact_amplitude * peak * std::exp(-0.5 * x * x);
            }
        });
    }
    return out;
}

namespace {

// Index j with axis[j] <= x <= axis[j + 1]; x must lie inside the axis.
Eigen::Index bracket(Eigen::ArrayXd const& axis, double x)
{
    auto const* begin = axis.data();
    auto const* end = begin + axis.size();
    auto const it = std::upper_bound(begin, end, x);
    return std::clamp<Eigen::Index>((it - begin) - 1, 0, axis.size() - 2);
}

double bilinear(JointSpectralGrid const& g, double ws, double wi)
{
    Eigen::Index const r = bracket(g.omega_s, ws);
    Eigen::Index const c = bracket(g.omega_i, wi);
    double const tr = (ws - g.omega_s[r]) / (g.omega_s[r + 1] - g.omega_s[r]);
    double const tc = (wi - g.omega_i[c]) / (g.omega_i[c + 1] - g.omega_i[c]);
    return (1 - tr) * (1 - tc) * g.intensity(r, c) + tr * (1 - tc) * g.intensity(r + 1, c) +
           (1 - tr) * tc * g.intensity(r, c + 1) + tr * tc * g.intensity(r + 1, c + 1);
}

}  // namespace

JsiComparison compare_jsi(JointSpectralGrid const& direct, JointSpectralGrid const& reconstructed)
{
    direct.validate();
    reconstructed.validate();
    double const peak_a = direct.intensity.maxCoeff();
    double const peak_b = reconstructed.intensity.maxCoeff();
    if (!(peak_a > 0.0) || !(peak_b > 0.0))
        throw NumericalError("compare_jsi: a grid is identically zero");

    JsiComparison out;
    out.omega_s_lo = std::max(direct.omega_s[0], reconstructed.omega_s[0]);
    out.omega_s_hi = std::min(direct.omega_s[direct.omega_s.size() - 1],
                              reconstructed.omega_s[reconstructed.omega_s.size() - 1]);
    out.omega_i_lo = std::max(direct.omega_i[0], reconstructed.omega_i[0]);
    out.omega_i_hi = std::min(direct.omega_i[direct.omega_i.size() - 1],
                              reconstructed.omega_i[reconstructed.omega_i.size() - 1]);

    double sum_diff = 0.0;
    double sum_ref = 0.0;
    for (Eigen::Index r = 0; r < direct.omega_s.size(); ++r) {
        double const ws = direct.omega_s[r];
        if (ws < out.omega_s_lo || ws > out.omega_s_hi)
            continue;
        for (Eigen::Index c = 0; c < direct.omega_i.size(); ++c) {
            double const wi = direct.omega_i[c];
            if (wi < out.omega_i_lo || wi > out.omega_i_hi)
                continue;
            double const a = direct.intensity(r, c) / peak_a;
            double const b = bilinear(reconstructed, ws, wi) / peak_b;
            sum_diff += (a - b) * (a - b);
            sum_ref += a * a;
            ++out.nodes;
        }
    }
    if (out.nodes == 0)
        throw ConfigError("compare_jsi: grids do not overlap");
    out.rms = std::sqrt(sum_diff / static_cast<double>(out.nodes));
    out.relative_l2 = sum_ref > 0.0 ? std::sqrt(sum_diff / sum_ref) : 0.0;
    return out;
}

}  // namespace spdc
