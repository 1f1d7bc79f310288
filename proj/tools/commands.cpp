#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <iostream>

#include <Eigen/QR>

#include "spdc/validation/acceptance.hpp"
#include "spdc/validation/scenarios.hpp"

#ifndef SPDC_VERSION
#define SPDC_VERSION "0.0.0"
#endif

namespace spdc::cli {

Outputs::Outputs(std::filesystem::path directory) : directory_(std::move(directory))
{
    if (!std::filesystem::exists(directory_)) {
        std::filesystem::create_directories(directory_);
        created_directory_ = true;
    } else if (!std::filesystem::is_directory(directory_)) {
        throw ConfigError("output path '" + directory_.string() + "' is not a directory");
    }
}

Outputs::~Outputs()
{
    if (committed_)
        return;
    std::error_code ec;
    for (auto const& name : names_)
        std::filesystem::remove(directory_ / name, ec);
    if (created_directory_)
        std::filesystem::remove(directory_, ec);  // only succeeds when empty
}

std::ofstream Outputs::open(std::string const& name, bool binary)
{
    auto const path = directory_ / name;
    names_.push_back(name);
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out)
        throw ConfigError("cannot write '" + path.string() + "'");
    out.exceptions(std::ios::badbit | std::ios::failbit);
    return out;
}

namespace {

json fwhm_json(Fwhm const& f)
{
    return {{"width", f.width}, {"lower", f.lower}, {"upper", f.upper}, {"range_limited", f.range_limited}};
}

json width_json(WidthEstimate const& w)
{
    return {{"fwhm_thz", w.fwhm_hz * 1e-12}, {"range_limited", w.range_limited}};
}

json report_json(EntanglementReport const& r)
{
    return {{"unconditional", width_json(r.widths.unconditional)},
            {"conditional", width_json(r.widths.conditional)},
            {"fedorov_ratio", r.fedorov_ratio},
            {"schmidt_number", r.schmidt_number}};
}

json axes_json(JointSpectralGrid const& g)
{
    auto axis = [](Eigen::ArrayXd const& a) {
        return json{{"start_rad_per_s", a[0]}, {"stop_rad_per_s", a[a.size() - 1]}, {"count", a.size()}};
    };
    return {{"omega_s", axis(g.omega_s)}, {"omega_i", axis(g.omega_i)}};
}

json summary_json(CountMeasurement const& m)
{
    auto const& s = m.summary;
    auto number = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
    return {{"counts_1", m.counts_1},
            {"counts_2", m.counts_2},
            {"coincidences", m.counts_c},
            {"singles_1_per_s", s.singles_1},
            {"singles_2_per_s", s.singles_2},
            {"coincidence_rate_per_s", s.coincidences},
            {"accidental_rate_per_s", s.accidentals},
            {"real_rate_per_s", s.real},
            {"g2_zero", number(s.g2_zero)},
            {"g2_stderr", number(m.g2_stderr)},
            {"car", number(s.car)}};
}

void write_line(std::ostream& out, char const* fmt, auto... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    out << buf;
}

CommandResult run_spectrum(RunConfig const& rc, Outputs& out)
{
    auto const pump = rc.pump();
    auto const crystal = rc.crystal();
    auto const grid = frequency_angular_map(pump, crystal, rc.spectrum_grid());
    {
        auto f = out.open("spectrum.csv");
        write_spectrum_csv(f, grid);
    }
    Eigen::Index const col = nearest_column(grid, 0.0);
    Eigen::ArrayXd const collinear = grid.intensity.col(col);
    {
        auto f = out.open("collinear.csv");
        f << "# columns: wavelength_nm,intensity_rel\n";
        write_line(f, "# angle_deg=%.10g\n", grid.angle_deg[col]);
        f << "wavelength_nm,intensity_rel\n";
        for (Eigen::Index r = 0; r < collinear.size(); ++r)
            write_line(f, "%.10g,%.10g\n", grid.wavelength_nm[r], collinear[r]);
    }
    auto const cut = degenerate_cut(grid, pump.center_wavelength_nm);
    CommandResult res;
    res.results = {{"thickness_m", crystal.thickness_m},
                   {"optic_axis_deg", radians_to_degrees(crystal.optic_axis_angle)},
                   {"collinear_angle_deg", grid.angle_deg[col]},
                   {"collinear_nulls", count_nulls(collinear, rc.null_threshold())},
                   {"degenerate_cut",
                    {{"angle_deg", cut.angle_deg},
                     {"spectral_fwhm_nm", fwhm_json(cut.spectral)},
                     {"angular_fwhm_deg", fwhm_json(cut.angular)}}}};
    return res;
}

CommandResult run_thickness(RunConfig const& rc, Outputs& out)
{
    auto const pump = rc.pump();
    auto crystal = rc.crystal();
    double const half = 0.5 * pump.angular_frequency();
    PhotonMode const s{half, 0.0, crystal.signal_axis};
    PhotonMode const i{half, 0.0, crystal.idler_axis};
    auto const dk = mismatch(pump, crystal, s, i);
    auto const lc = coherence_length(dk.longitudinal);
    if (lc.is_phase_matched())
        throw NumericalError("thickness: degenerate pair is phase matched; coherence length is unbounded");
    Eigen::ArrayXd const multiples = rc.thickness_multiples();
    auto const scan = thickness_scan(pump, crystal, multiples * lc.metres(), s, i);
    auto f = out.open("thickness.csv");
    f << "# columns: thickness_lc,thickness_m,rate_rel\n";
    write_line(f, "# coherence_length_m=%.10g\n", lc.metres());
    f << "thickness_lc,thickness_m,rate_rel\n";
    for (Eigen::Index k = 0; k < multiples.size(); ++k)
        write_line(f, "%.10g,%.10g,%.10g\n", multiples[k], scan.thickness_m[k], scan.rate[k]);
    CommandResult res;
    res.results = {{"coherence_length_m", lc.metres()}, {"longitudinal_mismatch_rad_per_m", dk.longitudinal}};
    return res;
}

// Pump with sigma from the config or, if a target is set, calibrated on the jsi grid.
PumpConfig jsi_pump(RunConfig const& rc, json& results)
{
    PumpConfig pump = rc.pump();
    double const target = rc.jsi_target_conditional_hz();
    if (target > 0.0) {
        auto const crystal = rc.crystal();
        auto const grid = rc.jsi_grid();
        auto const [lo, hi] = rc.jsi_sigma_bracket();
        pump.spectral_width = calibrate_pump_width(
            [&](double sigma) {
                PumpConfig p = pump;
                p.spectral_width = sigma;
                return widths(compute_jsi(p, crystal, grid)).conditional.fwhm_hz;
            },
            target, lo, hi);
        results["calibrated_to_conditional_thz"] = target * 1e-12;
    }
    results["sigma_rad_per_s"] = pump.spectral_width;
    return pump;
}

CommandResult run_jsi(RunConfig const& rc, Outputs& out)
{
    CommandResult res;
    auto const pump = jsi_pump(rc, res.results);
    auto const crystal = rc.crystal();
    auto const grid = compute_jsi(pump, crystal, rc.jsi_grid());
    {
        auto f = out.open("jsi.csv");
        write_jsi_csv(f, grid);
    }
    res.results["thickness_m"] = crystal.thickness_m;
    res.results["axes"] = axes_json(grid);
    res.results["entanglement"] = report_json(entanglement_report(grid));
    return res;
}

CommandResult run_entanglement(RunConfig const& rc, Outputs& out)
{
    CommandResult res;
    auto const pump = jsi_pump(rc, res.results);
    auto const grid = compute_jsi(pump, rc.crystal(), rc.jsi_grid());
    auto const report = entanglement_report(grid);
    Eigen::Index row = 0;
    Eigen::Index col = 0;
    grid.intensity.maxCoeff(&row, &col);
    {
        auto f = out.open("marginal.csv");
        f << "# columns: omega_s_rad_per_s,marginal_rel\nomega_s_rad_per_s,marginal_rel\n";
        Eigen::ArrayXd const m = grid.intensity.rowwise().sum();
        for (Eigen::Index r = 0; r < m.size(); ++r)
            write_line(f, "%.12g,%.10g\n", grid.omega_s[r], m[r]);
    }
    {
        auto f = out.open("conditional.csv");
        f << "# columns: omega_i_rad_per_s,intensity_rel\n";
        write_line(f, "# omega_s_rad_per_s=%.12g\n", grid.omega_s[row]);
        f << "omega_i_rad_per_s,intensity_rel\n";
        for (Eigen::Index c = 0; c < grid.omega_i.size(); ++c)
            write_line(f, "%.12g,%.10g\n", grid.omega_i[c], grid.intensity(row, c));
    }
    res.results["entanglement"] = report_json(report);
    res.results["fedorov_over_schmidt"] = report.fedorov_ratio / report.schmidt_number;
    return res;
}

CommandResult run_g2(RunConfig const& rc, Outputs& out)
{
    auto const source = rc.source();
    double const window = rc.coincidence_window_s();
    auto const stream = synthesize_stream(source);
    auto const format = rc.timetag_format();
    if (format == "csv") {
        auto f = out.open("timetags.csv");
        write_timetags_csv(f, stream);
    } else if (format == "binary") {
        auto f = out.open("timetags.bin", true);
        write_timetags_binary(f, stream);
    }
    auto const m = measure(stream, window);
    CommandResult res;
    res.results["measurement"] = summary_json(m);
    res.results["analytic_g2_zero"] = scenarios::analytic_g2(source, window);
    if (!stream.events.empty()) {
        auto const h = coincidence_histogram(stream, rc.histogram_bin_ps(), rc.histogram_max_lag_ps());
        auto f = out.open("histogram.csv");
        write_histogram_csv(f, h);
        res.results["histogram"] = {{"floor", h.floor},
                                    {"floor_stderr", h.floor_stderr},
                                    {"expected_floor", h.expected_floor},
                                    {"peak_g2", h.g2.maxCoeff()}};
    }
    return res;
}

CommandResult run_power_sweep(RunConfig const& rc, Outputs& out)
{
    auto const sweep = power_sweep(rc.source(), rc.reference_power(), rc.powers(), rc.coincidence_window_s());
    auto const n = static_cast<Eigen::Index>(sweep.size());
    Eigen::ArrayXd p(n), excess(n), real(n);
    auto f = out.open("power_sweep.csv");
    f << "# columns: power_rel,singles_1_per_s,singles_2_per_s,coincidences_per_s,real_per_s,g2_zero,g2_stderr,car\n";
    f << "power_rel,singles_1_per_s,singles_2_per_s,coincidences_per_s,real_per_s,g2_zero,g2_stderr,car\n";
    for (Eigen::Index j = 0; j < n; ++j) {
        auto const& m = sweep[static_cast<std::size_t>(j)].measurement;
        auto const& s = m.summary;
        write_line(f, "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.6g,%.10g\n", sweep[j].power, s.singles_1, s.singles_2,
                   s.coincidences, s.real, s.g2_zero, m.g2_stderr, s.car);
        p[j] = sweep[j].power;
        excess[j] = s.g2_zero - 1.0;
        real[j] = s.real;
    }
    CommandResult res;
    if (n >= 2 && (excess > 0.0).all() && (real > 0.0).all()) {
        auto const a = fit_power_law(p, excess);
        auto const b = fit_power_law(p, real);
        res.results["g2_minus_1_exponent"] = {{"value", a.exponent}, {"stderr", a.exponent_stderr}};
        res.results["real_rate_exponent"] = {{"value", b.exponent}, {"stderr", b.exponent_stderr}};
    }
    return res;
}

CommandResult run_polarization(RunConfig const& rc, Outputs& out)
{
    Eigen::ArrayXd const theta = rc.polarization_angles();
    Eigen::ArrayXd z(theta.size());
    auto f = out.open("polarization.csv");
    f << "# columns: pump_angle_deg,rate_z_rel,rate_y_rel\npump_angle_deg,rate_z_rel,rate_y_rel\n";
    for (Eigen::Index j = 0; j < theta.size(); ++j) {
        z[j] = polarization_response(theta[j], Analyzer::z);
        write_line(f, "%.10g,%.10g,%.10g\n", theta[j], z[j], polarization_response(theta[j], Analyzer::y));
    }
    Eigen::MatrixXd a(theta.size(), 2);
    a.col(0) = (theta * pi / 180.0).sin().square().matrix();
    a.col(1).setOnes();
    Eigen::VectorXd const coef = a.colPivHouseholderQr().solve(z.matrix());
    double const ss_tot = (z - z.mean()).square().sum();
    CommandResult res;
    res.results = {{"sin2_amplitude", coef[0]},
                   {"offset", coef[1]},
                   {"r_squared", ss_tot > 0.0 ? 1.0 - (a * coef - z.matrix()).squaredNorm() / ss_tot : 1.0}};
    return res;
}

CommandResult run_sps(RunConfig const& rc, Outputs& out)
{
    auto const config = rc.sps();
    auto const spectrum = rc.sps_spectrum();
    auto const efficiency = rc.sps_efficiency();
    double const pump_nm = spectrum.pump_wavelength_nm;
    auto const curve = calibrate(model_calibration_points(config, pump_nm, rc.sps_calibration_nm()), 2.0 * pump_nm);
    auto const histogram = simulate_sps(spectrum, efficiency, config);
    auto const rec = reconstruct_spectrum(histogram, curve);
    {
        auto f = out.open("delay_histogram.csv");
        write_delay_histogram_csv(f, histogram);
    }
    {
        auto f = out.open("calibration.csv");
        f << "# columns: wavelength_nm,delay_ps,fitted_wavelength_nm\n";
        write_line(f, "# c0=%.12g c1=%.12g c2=%.12g c3=%.12g reference_nm=%.10g\n", curve.coefficients[0],
                   curve.coefficients[1], curve.coefficients[2], curve.coefficients[3], curve.reference_nm);
        f << "wavelength_nm,delay_ps,fitted_wavelength_nm\n";
        for (auto const& p : curve.points)
            write_line(f, "%.10g,%.10g,%.10g\n", p.wavelength_nm, p.delay_ps, curve.wavelength_nm(p.delay_ps));
    }
    {
        auto f = out.open("sps_spectrum.csv");
        write_reconstructed_csv(f, rec);
    }
    auto const width = fwhm(rec.wavelength_nm, rec.density);
    double const center = 2.0 * pump_nm;
    double const dnu = bandwidth_hz(width.width, center);
    CommandResult res;
    res.results = {{"calibration",
                    {{"coefficients", {curve.coefficients[0], curve.coefficients[1], curve.coefficients[2],
                                       curve.coefficients[3]}},
                     {"residual_rms_nm", curve.residual_rms_nm},
                     {"monotonic", curve.monotonic},
                     {"span_ps", {curve.span_lo_ps, curve.span_hi_ps}}}},
                   {"pairs_detected", histogram.pairs_detected},
                   {"excluded_bins", rec.excluded_bins},
                   {"excluded_counts", rec.excluded_counts},
                   {"fwhm_nm", fwhm_json(width)},
                   {"bandwidth_hz", dnu},
                   {"correlation_time_fs", correlation_time(dnu) * 1e15}};
    return res;
}

CommandResult run_set(RunConfig const& rc, Outputs& out)
{
    CommandResult res;
    auto pump = rc.pump();
    auto const crystal = rc.crystal();
    auto scan = rc.set_scan();
    double const target = rc.jsi_target_conditional_hz();
    if (target > 0.0) {
        // Calibrate so the conditional width seen through the spectrometer hits the target.
        SetScanConfig clean = scan;
        clean.shg_artifact = false;
        auto const [lo, hi] = rc.jsi_sigma_bracket();
        pump.spectral_width = calibrate_pump_width(
            [&](double sigma) {
                PumpConfig p = pump;
                p.spectral_width = sigma;
                return widths(simulate_set(clean, p, crystal)).conditional.fwhm_hz;
            },
            target, lo, hi);
        res.results["calibrated_to_conditional_thz"] = target * 1e-12;
    }
    res.results["sigma_rad_per_s"] = pump.spectral_width;
    auto const reconstructed = simulate_set(scan, pump, crystal);
    {
        auto f = out.open("set_jsi.csv");
        write_jsi_csv(f, reconstructed);
    }
    res.results["thickness_m"] = crystal.thickness_m;
    res.results["resolution_nm"] = scan.resolution_nm;
    res.results["axes"] = axes_json(reconstructed);
    res.results["reconstructed"] = report_json(entanglement_report(reconstructed));
    if (rc.set_compare_direct()) {
        JsiGridSpec direct_grid{{reconstructed.omega_s[0], reconstructed.omega_s[reconstructed.omega_s.size() - 1],
                                 reconstructed.omega_s.size()},
                                {reconstructed.omega_i[0], reconstructed.omega_i[reconstructed.omega_i.size() - 1],
                                 reconstructed.omega_i.size()}};
        auto const direct = compute_jsi(pump, crystal, direct_grid);
        auto const cmp = compare_jsi(direct, reconstructed);
        res.results["comparison"] = {{"rms", cmp.rms},
                                     {"relative_l2", cmp.relative_l2},
                                     {"nodes", cmp.nodes},
                                     {"omega_s_range", {cmp.omega_s_lo, cmp.omega_s_hi}},
                                     {"omega_i_range", {cmp.omega_i_lo, cmp.omega_i_hi}}};
    }
    return res;
}

CommandResult run_validate(RunConfig const& rc, Outputs&)
{
    CommandResult res;
    res.results["criteria"] = json::array();
    validation::run_all(rc.materials(), [&](validation::CriterionResult const& r) {
        std::cout << validation::format(r) << '\n' << std::flush;
        res.results["criteria"].push_back({{"id", r.id},
                                           {"title", r.title},
                                           {"passed", r.passed},
                                           {"elapsed_s", r.elapsed_s},
                                           {"budget_s", r.budget_s},
                                           {"detail", r.detail}});
        res.success = res.success && r.passed;
    });
    return res;
}

std::string utc_timestamp()
{
    auto const now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

std::vector<CommandInfo> const& commands()
{
    static std::vector<CommandInfo> const table{
        {"spectrum", "frequency-angular emission map", run_spectrum},
        {"thickness", "pair rate versus crystal thickness", run_thickness},
        {"jsi", "joint spectral intensity grid", run_jsi},
        {"entanglement", "Fedorov ratio and Schmidt number", run_entanglement},
        {"g2", "synthetic HBT run: g2 histogram, g2(0), CAR", run_g2},
        {"power-sweep", "coincidence statistics versus pump power", run_power_sweep},
        {"polarization", "rate versus pump polarisation angle", run_polarization},
        {"sps", "single-photon spectroscopy through a dispersive fiber", run_sps},
        {"set", "stimulated-emission tomography seed scan", run_set},
        {"validate", "run the acceptance checks", run_validate},
    };
    return table;
}

CommandResult execute(CommandInfo const& info, RunConfig const& config, Outputs& outputs)
{
    auto const started = std::chrono::steady_clock::now();
    CommandResult result = info.run(config, outputs);
    double const elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    std::vector<std::string> files = outputs.names();
    std::string const sidecar = std::string(info.name) + ".json";
    json doc = {{"command", info.name},
                {"version", SPDC_VERSION},
                {"eigen_version", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                      "." + std::to_string(EIGEN_MINOR_VERSION)},
                {"seed", config.seed()},
                {"timestamp", utc_timestamp()},
                {"elapsed_s", elapsed},
                {"files", files},
                {"config", config.document()},
                {"results", result.results}};
    auto f = outputs.open(sidecar);
    f << doc.dump(2) << '\n';
    return result;
}

}  // namespace spdc::cli
