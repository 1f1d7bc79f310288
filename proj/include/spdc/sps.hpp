#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

#include "spdc/dispersion.hpp"

namespace spdc {

// Pair spectrum on the signal-wavelength axis; every signal wavelength lambda
// comes with its energy-conjugate idler for the (CW) pump. Continuous part is
// a piecewise-linear density over `wavelength_nm`; `lines` are discrete pairs.
struct PairSpectrum
{
    double pump_wavelength_nm = 405.0;
    Eigen::ArrayXd wavelength_nm;
    Eigen::ArrayXd density;

    struct Line
    {
        double wavelength_nm = 0.0;
        double weight = 1.0;
    };
    std::vector<Line> lines;

    void validate() const;
    double conjugate_nm(double wavelength_nm) const;
    double degenerate_nm() const { return 2.0 * pump_wavelength_nm; }
};

/// Gaussian in signal wavelength, sampled on `nodes` points over +-3 FWHM.
PairSpectrum gaussian_pair_spectrum(double pump_wavelength_nm, double center_nm, double fwhm_nm,
                                    Eigen::Index nodes = 2001);

// Single-photon detection efficiency q(lambda), optionally limited by a
// top-hat passband; the pair efficiency is q(lambda_s) q(lambda_i).
struct EfficiencyWindow
{
    enum class Shape { flat, gaussian, tabulated };

    Shape shape = Shape::flat;
    double peak = 1.0;
    double center_nm = 0.0;  // gaussian
    double fwhm_nm = 0.0;    // gaussian
    Eigen::ArrayXd table_wavelength_nm;  // tabulated, linear interpolation, zero outside
    Eigen::ArrayXd table_efficiency;
    double passband_min_nm = 0.0;
    double passband_max_nm = 1e9;

    void validate() const;
    double single(double wavelength_nm) const;
    double pair(double signal_nm, double idler_nm) const { return single(signal_nm) * single(idler_nm); }
};

/// Reads `wavelength_nm,efficiency` rows ('#' comments and a header allowed).
EfficiencyWindow read_efficiency_csv(std::istream& in);

struct SpsConfig
{
    MaterialPtr fiber;             // isotropic fiber material
    double fiber_length_m = 160.0;
    double jitter_sigma_ps = 30.0;  // per detector
    double bin_width_ps = 10.0;
    std::uint64_t n_pairs = 200000;
    std::uint64_t seed = 1;

    void validate() const;
};

// Histogram of arrival-time differences t2 - t1. Bin k is centred on
// k * bin_width.
struct DelayHistogram
{
    Eigen::ArrayXd delay_ps;
    Eigen::ArrayXd counts;
    double bin_width_ps = 0.0;
    std::uint64_t pairs_detected = 0;

    double edge_lo(Eigen::Index k) const { return delay_ps[k] - 0.5 * bin_width_ps; }
    double edge_hi(Eigen::Index k) const { return delay_ps[k] + 0.5 * bin_width_ps; }
};

/// Fiber delay at `wavelength_nm` (ps).
double fiber_delay_ps(SpsConfig const& config, double wavelength_nm);

/*!
 * Draws n_pairs pairs from spectrum x pair efficiency, routes the two photons
 * to detectors 1 and 2 in random order, and histograms
 * t2 - t1 = tau(lambda_2) - tau(lambda_1) + jitter.
 */
DelayHistogram simulate_sps(PairSpectrum const& spectrum, EfficiencyWindow const& efficiency,
                            SpsConfig const& config);

struct CalibrationPoint
{
    double wavelength_nm = 0.0;  // filter centre in front of detector 1
    double delay_ps = 0.0;       // measured peak of t2 - t1
};

/// Synthetic calibration: delays from the fiber model at the given filter
/// centres.
std::vector<CalibrationPoint> model_calibration_points(SpsConfig const& config, double pump_wavelength_nm,
                                                       std::vector<double> const& wavelengths_nm);

// lambda_1 - reference = c0 + c1 dt + c2 dt^2 + c3 dt^3 (dt in ps).
struct CalibrationCurve
{
    Eigen::Vector4d coefficients = Eigen::Vector4d::Zero();
    double reference_nm = 0.0;
    double span_lo_ps = 0.0;
    double span_hi_ps = 0.0;
    double residual_rms_nm = 0.0;
    bool monotonic = true;
    std::vector<CalibrationPoint> points;

    double wavelength_nm(double delay_ps) const;
    bool covers(double delay_ps) const { return delay_ps >= span_lo_ps && delay_ps <= span_hi_ps; }
};

/// Least-squares cubic through at least four distinct points. Throws
/// NumericalError if the design matrix is rank deficient.
CalibrationCurve calibrate(std::vector<CalibrationPoint> const& points, double reference_nm);

struct ReconstructedSpectrum
{
    Eigen::ArrayXd wavelength_nm;  // ascending, bin centres mapped through the curve
    Eigen::ArrayXd density;        // counts per nm
    Eigen::ArrayXd counts;
    Eigen::ArrayXd bin_width_nm;
    std::size_t excluded_bins = 0;  // outside the calibration span
    double excluded_counts = 0.0;
};

ReconstructedSpectrum reconstruct_spectrum(DelayHistogram const& histogram, CalibrationCurve const& calibration);

/// 1 / delta_nu.
double correlation_time(double spectral_width_hz);

/// Frequency width of a wavelength band: c * width / center^2.
double bandwidth_hz(double width_nm, double center_nm);

void write_delay_histogram_csv(std::ostream& out, DelayHistogram const& histogram);
void write_reconstructed_csv(std::ostream& out, ReconstructedSpectrum const& spectrum);

}  // namespace spdc
