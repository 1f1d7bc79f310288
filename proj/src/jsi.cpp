#include "spdc/jsi.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <utility>

#include <Eigen/SVD>
#include <boost/math/tools/roots.hpp>

#include "spdc/parallel.hpp"

namespace spdc {

void JointSpectralGrid::validate() const
{
    if (omega_s.size() < 2 || omega_i.size() < 2)
        throw ConfigError("joint spectral grid must be at least 2x2");
    if (intensity.rows() != omega_s.size() || intensity.cols() != omega_i.size())
        throw ConfigError("joint spectral grid: intensity shape does not match the axes");
    for (auto const* axis : {&omega_s, &omega_i}) {
        for (Eigen::Index j = 1; j < axis->size(); ++j) {
            if (!((*axis)[j] > (*axis)[j - 1]))
                throw ConfigError("joint spectral grid: axes must be strictly ascending");
        }
    }
    if (!intensity.allFinite() || (intensity < 0.0).any())
        throw ConfigError("joint spectral grid: intensities must be finite and non-negative");
}

void JsiGridSpec::validate() const
{
    omega_s.validate("jsi signal axis");
    omega_i.validate("jsi idler axis");
    if (!(omega_s.start > 0.0 && omega_i.start > 0.0))
        throw ConfigError("jsi axes must be positive frequencies");
}

JsiGridSpec seed_window_grid(double pump_wavelength_nm, double idler_min_nm, double idler_max_nm,
                             double signal_span_hz, Eigen::Index signal_nodes, Eigen::Index idler_nodes)
{
    if (!(idler_max_nm > idler_min_nm) || !(signal_span_hz > 0.0))
        throw ConfigError("seed_window_grid: invalid window");
    double const wi_lo = wavelength_nm_to_angular_frequency(idler_max_nm);
    double const wi_hi = wavelength_nm_to_angular_frequency(idler_min_nm);
    double const ws_mid = wavelength_nm_to_angular_frequency(pump_wavelength_nm) - 0.5 * (wi_lo + wi_hi);
    double const half = pi * signal_span_hz;
    return {{ws_mid - half, ws_mid + half, signal_nodes}, {wi_lo, wi_hi, idler_nodes}};
}

double jsi_value(PumpConfig const& pump, CrystalConfig const& crystal, double omega_s, double omega_i)
{
    if (pump.is_cw())
        throw ConfigError("jsi requires a pulsed pump (spectral_width > 0)");
    PhotonMode const signal{omega_s, 0.0, crystal.signal_axis};
    PhotonMode const idler{omega_i, 0.0, crystal.idler_axis};
    auto const dk = mismatch(pump, crystal, signal, idler);
    double const detuning = (omega_s + omega_i - pump.angular_frequency()) / pump.spectral_width;
    return phase_matching_function(dk.longitudinal, crystal.thickness_m) * std::exp(-0.5 * detuning * detuning);
}

JointSpectralGrid compute_jsi(PumpConfig const& pump, CrystalConfig const& crystal, JsiGridSpec const& spec)
{
    spec.validate();
    return compute_jsi(pump, crystal, spec.omega_s.nodes(), spec.omega_i.nodes());
}

JointSpectralGrid compute_jsi(PumpConfig const& pump, CrystalConfig const& crystal, Eigen::ArrayXd omega_s,
                              Eigen::ArrayXd omega_i)
{
    pump.validate();
    crystal.validate();
    if (pump.is_cw())
        throw ConfigError("jsi requires a pulsed pump (spectral_width > 0)");

    JointSpectralGrid grid;
    grid.omega_s = std::move(omega_s);
    grid.omega_i = std::move(omega_i);
    grid.intensity = Eigen::ArrayXXd::Zero(grid.omega_s.size(), grid.omega_i.size());
    grid.validate();
    Eigen::Index const ns = grid.omega_s.size();
    Eigen::Index const ni = grid.omega_i.size();

    // Wavenumbers per axis node; the pump wavenumber depends on the sum and
    // is evaluated per cell.
    Eigen::ArrayXd ks(ns);
    Eigen::ArrayXd ki(ni);
    for (Eigen::Index r = 0; r < ns; ++r)
        ks[r] = daughter_wavenumber(crystal, crystal.signal_axis, grid.omega_s[r]);
    for (Eigen::Index c = 0; c < ni; ++c)
        ki[c] = daughter_wavenumber(crystal, crystal.idler_axis, grid.omega_i[c]);
    // Surface pump range errors on the calling thread.
    pump_wavenumber(crystal, grid.omega_s[0] + grid.omega_i[0]);
    pump_wavenumber(crystal, grid.omega_s[ns - 1] + grid.omega_i[ni - 1]);

    double const omega_p0 = pump.angular_frequency();
    grid.intensity.resize(ns, ni);
    parallel_for(ns, [&](std::ptrdiff_t r) {
        for (Eigen::Index c = 0; c < ni; ++c) {
            double const sum = grid.omega_s[r] + grid.omega_i[c];
            double const dk = ks[r] + ki[c] - pump_wavenumber(crystal, sum);
            double const detuning = (sum - omega_p0) / pump.spectral_width;
            grid.intensity(r, c) =
                phase_matching_function(dk, crystal.thickness_m) * std::exp(-0.5 * detuning * detuning);
        }
    });
    return grid;
}

namespace {

WidthEstimate width_of(Eigen::ArrayXd const& axis, Eigen::ArrayXd const& profile)
{
    auto const f = fwhm(axis, profile);
    WidthEstimate out;
    out.range_limited = f.range_limited;
    double const w = f.range_limited ? axis[axis.size() - 1] - axis[0] : f.width;
    out.fwhm_hz = angular_frequency_to_hz(w);
    return out;
}

void require_nonzero(JointSpectralGrid const& grid, char const* what)
{
    grid.validate();
    if (!(grid.intensity.maxCoeff() > 0.0))
        throw NumericalError(std::string(what) + ": grid is identically zero");
}

}  // namespace

SpectralWidths widths(JointSpectralGrid const& grid)
{
    require_nonzero(grid, "widths");
    Eigen::Index row = 0;
    Eigen::Index col = 0;
    grid.intensity.maxCoeff(&row, &col);

    Eigen::ArrayXd const marginal = grid.intensity.rowwise().sum();
    Eigen::ArrayXd const section = grid.intensity.row(row).transpose();
    return {width_of(grid.omega_s, marginal), width_of(grid.omega_i, section)};
}

double fedorov_ratio(double unconditional_hz, double conditional_hz)
{
    if (!(conditional_hz > 0.0))
        throw NumericalError("fedorov_ratio: conditional width must be positive");
    return unconditional_hz / conditional_hz;
}

double schmidt_number(JointSpectralGrid const& grid)
{
    require_nonzero(grid, "schmidt_number");
    Eigen::MatrixXd const amplitude = grid.intensity.sqrt().matrix();
    Eigen::BDCSVD<Eigen::MatrixXd> svd(amplitude);
    Eigen::ArrayXd const s = svd.singularValues().array();
    if (s.size() < 2 || s[1] < 1e-9 * s[0])
        return 1.0;
    Eigen::ArrayXd const p = s.square() / s.square().sum();
    return 1.0 / p.square().sum();
}

EntanglementReport entanglement_report(JointSpectralGrid const& grid)
{
    EntanglementReport report;
    report.widths = widths(grid);
    report.fedorov_ratio = fedorov_ratio(report.widths.unconditional.fwhm_hz, report.widths.conditional.fwhm_hz);
    report.schmidt_number = schmidt_number(grid);
    return report;
}

double calibrate_pump_width(std::function<double(double)> const& conditional_width_hz, double target_hz,
                            double sigma_lo, double sigma_hi)
{
    if (!(target_hz > 0.0) || !(sigma_lo > 0.0) || !(sigma_hi > sigma_lo))
        throw ConfigError("calibrate_pump_width: invalid target or bracket");
    auto residual = [&](double sigma) { return conditional_width_hz(sigma) - target_hz; };
    double const flo = residual(sigma_lo);
    double const fhi = residual(sigma_hi);
    if ((flo < 0.0) == (fhi < 0.0))
        throw NumericalError("calibrate_pump_width: target width not bracketed");
    std::uintmax_t iterations = 100;
    auto const [lo, hi] = boost::math::tools::toms748_solve(residual, sigma_lo, sigma_hi, flo, fhi,
                                                            boost::math::tools::eps_tolerance<double>(40), iterations);
    return 0.5 * (lo + hi);
}

void write_jsi_csv(std::ostream& out, JointSpectralGrid const& grid)
{
    char buf[128];
    out << "# columns: omega_s_rad_per_s,omega_i_rad_per_s,intensity_rel\n";
    out << "omega_s_rad_per_s,omega_i_rad_per_s,intensity_rel\n";
    for (Eigen::Index r = 0; r < grid.intensity.rows(); ++r) {
        for (Eigen::Index c = 0; c < grid.intensity.cols(); ++c) {
            std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.10g\n", grid.omega_s[r], grid.omega_i[c],
                          grid.intensity(r, c));
            out << buf;
        }
    }
}

}  // namespace spdc
