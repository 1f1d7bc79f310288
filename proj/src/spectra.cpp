#include "spdc/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include <boost/math/tools/roots.hpp>

#include "spdc/parallel.hpp"

namespace spdc {

char const* to_string(AngleFrame frame)
{
    return frame == AngleFrame::external ? "external" : "internal";
}

char const* to_string(IdlerIntegration mode)
{
    return mode == IdlerIntegration::quadrature ? "quadrature" : "collinear_pump";
}

AngleFrame angle_frame_from_string(std::string_view text)
{
    if (text == "external")
        return AngleFrame::external;
    if (text == "internal")
        return AngleFrame::internal;
    throw ConfigError("unknown angle frame '" + std::string(text) + "'");
}

IdlerIntegration idler_integration_from_string(std::string_view text)
{
    if (text == "quadrature")
        return IdlerIntegration::quadrature;
    if (text == "collinear_pump")
        return IdlerIntegration::collinear_pump;
    throw ConfigError("unknown idler integration '" + std::string(text) + "'");
}

Analyzer analyzer_from_string(std::string_view text)
{
    if (text == "y")
        return Analyzer::y;
    if (text == "z")
        return Analyzer::z;
    throw ConfigError("unknown analyzer '" + std::string(text) + "' (expected y or z)");
}

void SpectrumGridSpec::validate() const
{
    wavelength_nm.validate("spectrum wavelength axis");
    angle_deg.validate("spectrum angle axis");
    if (!(angle_deg.start > -90.0 && angle_deg.stop < 90.0))
        throw ConfigError("spectrum angle axis must lie inside (-90, 90) degrees");
    if (quadrature_nodes < 3)
        throw ConfigError("spectrum: quadrature needs at least 3 nodes");
}

double critical_angle(double n)
{
    if (!(n >= 1.0))
        throw ConfigError("critical_angle: refractive index must be >= 1");
    return radians_to_degrees(std::asin(1.0 / n));
}

double external_to_internal_angle(double external_angle, double n)
{
    return std::asin(std::sin(external_angle) / n);
}

std::optional<double> internal_to_external_angle(double internal_angle, double n)
{
    double const s = n * std::sin(internal_angle);
    if (std::abs(s) >= 1.0)
        return std::nullopt;
    return std::asin(s);
}

std::optional<double> transverse_root_idler_angle(double signal_wavenumber, double idler_wavenumber,
                                                  double signal_internal_angle)
{
    double const s = -signal_wavenumber * std::sin(signal_internal_angle) / idler_wavenumber;
    if (std::abs(s) >= 1.0)
        return std::nullopt;
    return std::asin(s);
}

namespace {

// Per-wavelength quantities shared by every angle of a map row.
struct RowKinematics
{
    double ks = 0.0;
    double ki = 0.0;
    double kp = 0.0;
    double ns = 1.0;
    // Largest idler transverse wavevector that still leaves the crystal:
    // k_i sin(critical angle) = omega_i / c.
    double q_max = 0.0;
};

RowKinematics row_kinematics(PumpConfig const& pump, CrystalConfig const& crystal, double signal_wavelength_nm)
{
    double const omega_p = pump.angular_frequency();
    double const omega_s = wavelength_nm_to_angular_frequency(signal_wavelength_nm);
    double const omega_i = omega_p - omega_s;
    if (!(omega_i > 0.0))
        throw ConfigError("signal wavelength " + std::to_string(signal_wavelength_nm)
                          + " nm is not longer than the pump wavelength");
    RowKinematics row;
    row.ks = daughter_wavenumber(crystal, crystal.signal_axis, omega_s);
    row.ki = daughter_wavenumber(crystal, crystal.idler_axis, omega_i);
    row.kp = pump_wavenumber(crystal, omega_p);
    row.ns = row.ks * speed_of_light / omega_s;
    row.q_max = std::min(omega_i / speed_of_light, row.ki);
    return row;
}

double cell_intensity(RowKinematics const& row, double thickness, double waist, double signal_internal_angle,
                      IdlerIntegration mode, int nodes)
{
    double const q0 = -row.ks * std::sin(signal_internal_angle);
    double const longitudinal_signal = row.ks * std::cos(signal_internal_angle) - row.kp;

    if (mode == IdlerIntegration::collinear_pump) {
        if (std::abs(q0) > row.q_max)
            return 0.0;
        double const s = q0 / row.ki;
        double const dk = longitudinal_signal + row.ki * std::sqrt(1.0 - s * s);
        return phase_matching_function(dk, thickness);
    }

    double const lo = std::max(q0 - quadrature_half_width / waist, -row.q_max);
    double const hi = std::min(q0 + quadrature_half_width / waist, row.q_max);
    if (!(hi > lo))
        return 0.0;
    double const h = (hi - lo) / static_cast<double>(nodes - 1);
    double sum = 0.0;
    for (int j = 0; j < nodes; ++j) {
        double const q = lo + h * j;
        double const s = q / row.ki;
        double const dk = longitudinal_signal + row.ki * std::sqrt(1.0 - s * s);
        double const x = (q - q0) * waist;
        double const f = phase_matching_function(dk, thickness) * std::exp(-x * x);
        sum += (j == 0 || j == nodes - 1) ? 0.5 * f : f;
    }
    return sum * h * waist / std::sqrt(pi);
}

void check_cw(PumpConfig const& pump, CrystalConfig const& crystal)
{
    pump.validate();
    crystal.validate();
    if (!pump.is_cw())
        throw ConfigError("frequency-angular maps assume a CW pump (spectral_width = 0)");
}

}  // namespace

double emission_intensity(PumpConfig const& pump, CrystalConfig const& crystal, double signal_wavelength_nm,
                          double signal_internal_angle, IdlerIntegration mode, int nodes)
{
    check_cw(pump, crystal);
    if (nodes < 3)
        throw ConfigError("emission_intensity: quadrature needs at least 3 nodes");
    auto const row = row_kinematics(pump, crystal, signal_wavelength_nm);
    return cell_intensity(row, crystal.thickness_m, pump.waist_m, signal_internal_angle, mode, nodes);
}

SpectrumGrid frequency_angular_map(PumpConfig const& pump, CrystalConfig const& crystal,
                                   SpectrumGridSpec const& spec)
{
    check_cw(pump, crystal);
    spec.validate();

    SpectrumGrid grid;
    grid.wavelength_nm = spec.wavelength_nm.nodes();
    grid.angle_deg = spec.angle_deg.nodes();
    grid.frame = spec.frame;
    Eigen::Index const rows = grid.wavelength_nm.size();
    Eigen::Index const cols = grid.angle_deg.size();
    grid.intensity.setZero(rows, cols);
    grid.masked.setConstant(rows, cols, false);

    // Evaluate the dispersion up front so range errors surface before any
    // parallel work starts.
    std::vector<RowKinematics> kin(static_cast<std::size_t>(rows));
    for (Eigen::Index r = 0; r < rows; ++r)
        kin[static_cast<std::size_t>(r)] = row_kinematics(pump, crystal, grid.wavelength_nm[r]);

    parallel_for(rows, [&](std::ptrdiff_t r) {
        auto const& row = kin[static_cast<std::size_t>(r)];
        double const critical = std::asin(1.0 / row.ns);
        for (Eigen::Index c = 0; c < cols; ++c) {
            double const angle = degrees_to_radians(grid.angle_deg[c]);
            double const internal =
                spec.frame == AngleFrame::external ? external_to_internal_angle(angle, row.ns) : angle;
            if (std::abs(internal) > critical) {
                grid.masked(r, c) = true;
                continue;
            }
            grid.intensity(r, c) = cell_intensity(row, crystal.thickness_m, pump.waist_m, internal,
                                                  spec.integration, spec.quadrature_nodes);
        }
    });
    return grid;
}

std::optional<double> phase_matched_signal_angle(PumpConfig const& pump, CrystalConfig const& crystal,
                                                 double signal_wavelength_nm)
{
    check_cw(pump, crystal);
    auto const row = row_kinematics(pump, crystal, signal_wavelength_nm);
    auto longitudinal = [&](double theta) {
        double const s = row.ks * std::sin(theta) / row.ki;
        return row.ks * std::cos(theta) + row.ki * std::sqrt(std::max(0.0, 1.0 - s * s)) - row.kp;
    };

    double const limit = std::min(std::asin(1.0 / row.ns), row.ki < row.ks ? std::asin(row.ki / row.ks) : pi / 2);
    double const f0 = longitudinal(0.0);
    if (f0 == 0.0)
        return 0.0;

    constexpr int scan = 2000;
    double a = 0.0;
    double fa = f0;
    for (int j = 1; j <= scan; ++j) {
        double const b = limit * j / scan;
        double const fb = longitudinal(b);
        if (fb == 0.0)
            return b;
        if ((fa < 0.0) != (fb < 0.0)) {
            std::uintmax_t iterations = 200;
            auto const [lo, hi] = boost::math::tools::toms748_solve(
                longitudinal, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(50), iterations);
            return 0.5 * (lo + hi);
        }
        a = b;
        fa = fb;
    }
    return std::nullopt;
}

double phase_matching_cut_angle(PumpConfig const& pump, CrystalConfig const& crystal, double signal_wavelength_nm,
                                double signal_internal_angle)
{
    check_cw(pump, crystal);
    if (crystal.pump_axis != PolarizationAxis::extraordinary)
        throw NumericalError("phase_matching_cut_angle: an ordinary pump does not tune with the cut angle");
    double const omega_p = pump.angular_frequency();
    double const omega_s = wavelength_nm_to_angular_frequency(signal_wavelength_nm);
    double const omega_i = omega_p - omega_s;
    if (!(omega_i > 0.0))
        throw ConfigError("phase_matching_cut_angle: signal must be longer than the pump wavelength");

    auto longitudinal = [&](double cut) {
        CrystalConfig c = crystal;
        c.optic_axis_angle = cut;
        double const ks = daughter_wavenumber(c, c.signal_axis, omega_s);
        double const ki = daughter_wavenumber(c, c.idler_axis, omega_i);
        double const kp = pump_wavenumber(c, omega_p);
        double const s = ks * std::sin(signal_internal_angle) / ki;
        if (std::abs(s) >= 1.0)
            throw NumericalError("phase_matching_cut_angle: no idler direction cancels the transverse mismatch");
        return ks * std::cos(signal_internal_angle) + ki * std::sqrt(1.0 - s * s) - kp;
    };

    double const a = 1e-6;
    double const b = pi / 2;
    double const fa = longitudinal(a);
    double const fb = longitudinal(b);
    if ((fa < 0.0) == (fb < 0.0))
        throw NumericalError("phase_matching_cut_angle: no cut angle phase matches this pair");
    std::uintmax_t iterations = 200;
    auto const [lo, hi] = boost::math::tools::toms748_solve(longitudinal, a, b, fa, fb,
                                                            boost::math::tools::eps_tolerance<double>(50), iterations);
    return 0.5 * (lo + hi);
}

ThicknessScan thickness_scan(PumpConfig const& pump, CrystalConfig const& crystal,
                             Eigen::Ref<Eigen::ArrayXd const> const& thickness_m, PhotonMode const& signal,
                             PhotonMode const& idler)
{
    pump.validate();
    crystal.validate();
    if (thickness_m.size() == 0 || !(thickness_m >= 0.0).all())
        throw ConfigError("thickness_scan: thicknesses must be non-negative");

    ThicknessScan scan;
    scan.thickness_m = thickness_m;
    scan.mismatch = mismatch(pump, crystal, signal, idler);
    scan.coherence_length = coherence_length(scan.mismatch.longitudinal);
    scan.rate = thickness_m.unaryExpr([&](double L) {
        return pair_probability(crystal.d_eff_pm_per_v, L, scan.mismatch.longitudinal, scan.mismatch.transverse,
                                pump.waist_m);
    });
    return scan;
}

double polarization_response(double pump_angle_deg, Analyzer analyzer)
{
    // Only the zzz tensor element is kept: the pair amplitude is
    // d33 (z . e_pump)(z . e_analyzer)^2 with both daughters analysed alike.
    double const theta = degrees_to_radians(pump_angle_deg);
    double const pump_z = std::sin(theta);
    double const analyzer_z = analyzer == Analyzer::z ? 1.0 : 0.0;
    double const amplitude = pump_z * analyzer_z * analyzer_z;
    return amplitude * amplitude;
}

Eigen::Index nearest_column(SpectrumGrid const& grid, double angle_deg)
{
    Eigen::Index c = 0;
    (grid.angle_deg - angle_deg).abs().minCoeff(&c);
    return c;
}

DegenerateCut degenerate_cut(SpectrumGrid const& grid, double pump_wavelength_nm)
{
    if (grid.wavelength_nm.size() < 2 || grid.angle_deg.size() < 2)
        throw ConfigError("degenerate_cut: grid too small");
    DegenerateCut cut;
    (grid.wavelength_nm - 2.0 * pump_wavelength_nm).abs().minCoeff(&cut.row);

    Eigen::Index const first = nearest_column(grid, 0.0);
    Eigen::Index const c0 = grid.angle_deg[first] < 0.0 ? first + 1 : first;
    if (c0 >= grid.angle_deg.size())
        throw ConfigError("degenerate_cut: grid has no non-negative angles");
    Eigen::Index const n = grid.angle_deg.size() - c0;
    Eigen::ArrayXd const row = grid.intensity.row(cut.row).segment(c0, n).transpose();
    Eigen::Index best = 0;
    row.maxCoeff(&best);
    cut.column = c0 + best;
    cut.angle_deg = grid.angle_deg[cut.column];
    cut.spectral = fwhm(grid.wavelength_nm, grid.intensity.col(cut.column));
    cut.angular = fwhm(grid.angle_deg.segment(c0, n), row);
    return cut;
}

Eigen::ArrayXd angle_integrated_spectrum(SpectrumGrid const& grid, double max_abs_angle_deg)
{
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(grid.wavelength_nm.size());
    for (Eigen::Index c = 0; c < grid.angle_deg.size(); ++c) {
        if (std::abs(grid.angle_deg[c]) > max_abs_angle_deg)
            continue;
        for (Eigen::Index r = 0; r < out.size(); ++r) {
            if (!grid.masked(r, c))
                out[r] += grid.intensity(r, c);
        }
    }
    return out;
}

void write_spectrum_csv(std::ostream& out, SpectrumGrid const& grid)
{
    char buf[160];
    out << "# columns: wavelength_nm,angle_deg,intensity_rel,masked\n";
    std::snprintf(buf, sizeof buf, "# wavelength_nm: %ld nodes [%.10g, %.10g] (signal, vacuum)\n",
                  static_cast<long>(grid.wavelength_nm.size()), grid.wavelength_nm[0],
                  grid.wavelength_nm[grid.wavelength_nm.size() - 1]);
    out << buf;
    std::snprintf(buf, sizeof buf, "# angle_deg: %ld nodes [%.10g, %.10g] (%s)\n",
                  static_cast<long>(grid.angle_deg.size()), grid.angle_deg[0],
                  grid.angle_deg[grid.angle_deg.size() - 1], to_string(grid.frame));
    out << buf;
    out << "wavelength_nm,angle_deg,intensity_rel,masked\n";
    for (Eigen::Index r = 0; r < grid.intensity.rows(); ++r) {
        for (Eigen::Index c = 0; c < grid.intensity.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%d\n", grid.wavelength_nm[r], grid.angle_deg[c],
                          grid.intensity(r, c), grid.masked(r, c) ? 1 : 0);
            out << buf;
        }
    }
}

}  // namespace spdc
