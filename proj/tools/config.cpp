#include "config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "embedded_presets.hpp"
#include "spdc/validation/scenarios.hpp"

namespace spdc::cli {

namespace {

enum class Kind { number, string, boolean, array, object, null };

Kind kind_of(json const& j)
{
    if (j.is_number())
        return Kind::number;
    if (j.is_string())
        return Kind::string;
    if (j.is_boolean())
        return Kind::boolean;
    if (j.is_array())
        return Kind::array;
    if (j.is_object())
        return Kind::object;
    return Kind::null;
}

char const* kind_name(Kind k)
{
    switch (k) {
    case Kind::number: return "number";
    case Kind::string: return "string";
    case Kind::boolean: return "boolean";
    case Kind::array: return "array";
    case Kind::object: return "object";
    case Kind::null: return "null";
    }
    return "?";
}

json parse_embedded(char const* name, char const* text)
{
    try {
        return json::parse(text);
    } catch (json::exception const& e) {
        throw ConfigError(std::string("embedded document '") + name + "' is malformed: " + e.what());
    }
}

std::map<std::string, json> const& presets()
{
    static std::map<std::string, json> const table = [] {
        std::map<std::string, json> out;
        for (auto const& p : embedded::presets)
            out.emplace(p.name, parse_embedded(p.name, p.text));
        return out;
    }();
    return table;
}

// Every key of `value` must exist in `schema` with a compatible type.
void check_against(json const& value, json const& schema, std::string const& path)
{
    if (schema.is_object()) {
        if (!value.is_object())
            throw ConfigError("config: '" + path + "' must be an object");
        for (auto const& [key, child] : value.items()) {
            std::string const where = path.empty() ? key : path + "." + key;
            if (!schema.contains(key))
                throw ConfigError("config: unknown key '" + where + "'");
            check_against(child, schema.at(key), where);
        }
        return;
    }
    Kind const want = kind_of(schema);
    Kind const got = kind_of(value);
    bool const conjugate_stop = schema.is_string() && schema.get<std::string>() == "conjugate" && got == Kind::number;
    if (got != want && !conjugate_stop)
        throw ConfigError("config: '" + path + "' must be a " + kind_name(want) + ", got " + kind_name(got));
    if (want == Kind::array) {
        Kind const element = schema.empty() ? Kind::number : kind_of(schema.front());
        for (auto const& item : value) {
            if (kind_of(item) != element)
                throw ConfigError("config: elements of '" + path + "' must be " + kind_name(element) + "s");
        }
    }
}

template <typename T>
T get(json const& j, char const* key)
{
    return j.at(key).get<T>();
}

UniformAxis axis_from(json const& j)
{
    UniformAxis a;
    a.start = get<double>(j, "start");
    a.stop = get<double>(j, "stop");
    a.count = get<Eigen::Index>(j, "count");
    return a;
}

std::filesystem::path resolve_data_path(std::string const& name)
{
    std::filesystem::path const p(name);
    if (p.is_absolute() || std::filesystem::exists(p))
        return p;
    return scenarios::data_directory() / p;
}

}  // namespace

std::vector<std::string> preset_names()
{
    std::vector<std::string> names;
    for (auto const& [name, doc] : presets())
        names.push_back(name);
    return names;
}

json const& defaults_document()
{
    static json const doc = parse_embedded("defaults", embedded::defaults);
    return doc;
}

json const& preset_document(std::string const& name)
{
    auto const& table = presets();
    auto const it = table.find(name);
    if (it == table.end()) {
        std::string known;
        for (auto const& [n, doc] : table)
            known += (known.empty() ? "" : ", ") + n;
        throw ConfigError("unknown preset '" + name + "' (known: " + known + ")");
    }
    return it->second;
}

RunConfig RunConfig::resolve(std::optional<std::string> const& preset,
                             std::optional<std::filesystem::path> const& config_file,
                             std::optional<std::uint64_t> seed_override)
{
    RunConfig rc;
    rc.doc_ = defaults_document();
    if (preset) {
        json const& patch = preset_document(*preset);
        check_against(patch, defaults_document(), "");
        rc.doc_.merge_patch(patch);
    }
    if (config_file) {
        std::ifstream in(*config_file);
        if (!in)
            throw ConfigError("cannot open config file '" + config_file->string() + "'");
        json patch;
        try {
            patch = json::parse(in);
        } catch (json::exception const& e) {
            throw ConfigError("config file '" + config_file->string() + "': " + e.what());
        }
        check_against(patch, defaults_document(), "");
        rc.doc_.merge_patch(patch);
    }
    if (seed_override)
        rc.doc_["seed"] = *seed_override;
    check_against(rc.doc_, defaults_document(), "");

    auto const dir = rc.doc_.at("materials_dir").get<std::string>();
    rc.materials_ = dir.empty() ? MaterialLibrary::load_default() : MaterialLibrary::load_directory(dir);
    return rc;
}

json const& RunConfig::at(char const* section) const
{
    return doc_.at(section);
}

std::uint64_t RunConfig::seed() const
{
    auto const& s = doc_.at("seed");
    if (!s.is_number_integer() || (s.is_number_integer() && !s.is_number_unsigned() && s.get<std::int64_t>() < 0))
        throw ConfigError("config: 'seed' must be a non-negative integer");
    return s.get<std::uint64_t>();
}

PumpConfig RunConfig::pump() const
{
    auto const& j = at("pump");
    PumpConfig p;
    p.center_wavelength_nm = get<double>(j, "wavelength_nm");
    p.waist_m = get<double>(j, "waist_um") * 1e-6;
    p.spectral_width = get<double>(j, "spectral_width_rad_per_s");
    p.polarization_angle_deg = get<double>(j, "polarization_deg");
    p.validate();
    return p;
}

CrystalConfig RunConfig::crystal() const
{
    auto const& j = at("crystal");
    CrystalConfig c;
    c.material = materials_.get(get<std::string>(j, "material"));
    c.d_eff_pm_per_v = get<double>(j, "d_eff_pm_per_v");
    auto const& axes = j.at("axes");
    c.pump_axis = polarization_axis_from_string(get<std::string>(axes, "pump"));
    c.signal_axis = polarization_axis_from_string(get<std::string>(axes, "signal"));
    c.idler_axis = polarization_axis_from_string(get<std::string>(axes, "idler"));

    PumpConfig const p = pump();
    double const degenerate = 2.0 * p.center_wavelength_nm;
    auto const& oa = j.at("optic_axis");
    auto const mode = get<std::string>(oa, "mode");
    if (mode == "fixed") {
        c.optic_axis_angle = degrees_to_radians(get<double>(oa, "angle_deg"));
    } else if (mode == "phase_match") {
        double const n_s = refractive_index(*c.material, c.signal_axis, degenerate);
        double const internal = external_to_internal_angle(degrees_to_radians(get<double>(oa, "ring_external_deg")), n_s);
        c.thickness_m = 1.0;  // the solver validates the crystal; real value set below
        PumpConfig cw = p;
        cw.spectral_width = 0.0;
        c.optic_axis_angle = phase_matching_cut_angle(cw, c, degenerate, internal);
    } else {
        throw ConfigError("config: crystal.optic_axis.mode must be 'fixed' or 'phase_match'");
    }

    auto const& t = j.at("thickness");
    double const value = get<double>(t, "value");
    auto const unit = get<std::string>(t, "unit");
    if (unit == "m") {
        c.thickness_m = value;
    } else if (unit == "um") {
        c.thickness_m = value * 1e-6;
    } else if (unit == "lc") {
        double const half = 0.5 * p.angular_frequency();
        CrystalConfig probe = c;
        probe.thickness_m = 1.0;
        auto const dk = mismatch(p, probe, {half, 0.0, c.signal_axis}, {half, 0.0, c.idler_axis});
        c.thickness_m = value * coherence_length(dk.longitudinal).metres();
    } else {
        throw ConfigError("config: crystal.thickness.unit must be 'm', 'um' or 'lc'");
    }
    c.validate();
    return c;
}

SpectrumGridSpec RunConfig::spectrum_grid() const
{
    auto const& j = at("spectrum");
    SpectrumGridSpec g;
    auto const& w = j.at("wavelength_nm");
    g.wavelength_nm.start = get<double>(w, "start");
    g.wavelength_nm.count = get<Eigen::Index>(w, "count");
    if (w.at("stop").is_string()) {
        if (w.at("stop").get<std::string>() != "conjugate")
            throw ConfigError("config: spectrum.wavelength_nm.stop must be a number or \"conjugate\"");
        g.wavelength_nm.stop = conjugate_wavelength_nm(pump().center_wavelength_nm, g.wavelength_nm.start);
    } else {
        g.wavelength_nm.stop = get<double>(w, "stop");
    }
    g.angle_deg = axis_from(j.at("angle_deg"));
    g.frame = angle_frame_from_string(get<std::string>(j, "frame"));
    g.integration = idler_integration_from_string(get<std::string>(j, "integration"));
    g.quadrature_nodes = get<int>(j, "quadrature_nodes");
    g.validate();
    return g;
}

double RunConfig::null_threshold() const
{
    return get<double>(at("spectrum"), "null_threshold");
}

Eigen::ArrayXd RunConfig::thickness_multiples() const
{
    auto const& j = at("thickness");
    UniformAxis a{get<double>(j, "start_lc"), get<double>(j, "stop_lc"), get<Eigen::Index>(j, "count")};
    a.validate("thickness scan");
    if (a.start < 0.0)
        throw ConfigError("config: thickness.start_lc must be >= 0");
    return a.nodes();
}

JsiGridSpec RunConfig::jsi_grid() const
{
    auto const& j = at("jsi");
    return seed_window_grid(pump().center_wavelength_nm, get<double>(j, "idler_min_nm"), get<double>(j, "idler_max_nm"),
                            get<double>(j, "signal_span_thz") * 1e12, get<Eigen::Index>(j, "signal_nodes"),
                            get<Eigen::Index>(j, "idler_nodes"));
}

double RunConfig::jsi_target_conditional_hz() const
{
    double const t = get<double>(at("jsi"), "target_conditional_thz");
    if (t < 0.0)
        throw ConfigError("config: jsi.target_conditional_thz must be >= 0 (0 disables calibration)");
    return t * 1e12;
}

std::pair<double, double> RunConfig::jsi_sigma_bracket() const
{
    auto const b = at("jsi").at("sigma_bracket_rad_per_s").get<std::vector<double>>();
    if (b.size() != 2)
        throw ConfigError("config: jsi.sigma_bracket_rad_per_s must have two entries");
    return {b[0], b[1]};
}

SourceConfig RunConfig::source() const
{
    auto const& j = at("counting");
    SourceConfig s;
    s.pair_rate = get<double>(j, "pair_rate");
    auto const bg = j.at("background_rates").get<std::vector<double>>();
    auto const eta = j.at("efficiencies").get<std::vector<double>>();
    if (bg.size() != 2 || eta.size() != 2)
        throw ConfigError("config: counting.background_rates and counting.efficiencies need two entries");
    s.background_rates = {bg[0], bg[1]};
    s.efficiencies = {eta[0], eta[1]};
    s.jitter_sigma_ps = get<double>(j, "jitter_ps");
    s.duration_s = get<double>(j, "duration_s");
    s.seed = seed();
    s.validate();
    return s;
}

double RunConfig::coincidence_window_s() const
{
    double const w = get<double>(at("counting"), "window_ns") * 1e-9;
    if (!(w > 0.0))
        throw ConfigError("config: counting.window_ns must be positive");
    return w;
}

double RunConfig::histogram_bin_ps() const
{
    return get<double>(at("counting").at("histogram"), "bin_ps");
}

double RunConfig::histogram_max_lag_ps() const
{
    return get<double>(at("counting").at("histogram"), "max_lag_ps");
}

std::string RunConfig::timetag_format() const
{
    auto f = get<std::string>(at("counting"), "timetags");
    if (f != "none" && f != "csv" && f != "binary")
        throw ConfigError("config: counting.timetags must be 'none', 'csv' or 'binary'");
    return f;
}

double RunConfig::reference_power() const
{
    return get<double>(at("power_sweep"), "reference_power");
}

std::vector<double> RunConfig::powers() const
{
    auto p = at("power_sweep").at("powers").get<std::vector<double>>();
    if (p.empty())
        throw ConfigError("config: power_sweep.powers is empty");
    return p;
}

Eigen::ArrayXd RunConfig::polarization_angles() const
{
    auto const a = axis_from(at("polarization").at("angle_deg"));
    a.validate("polarization angles");
    return a.nodes();
}

SpsConfig RunConfig::sps() const
{
    auto const& j = at("sps");
    SpsConfig c;
    c.fiber = materials_.get(get<std::string>(j, "fiber_material"));
    c.fiber_length_m = get<double>(j, "fiber_length_m");
    c.jitter_sigma_ps = get<double>(j, "jitter_ps");
    c.bin_width_ps = get<double>(j, "bin_ps");
    c.n_pairs = get<std::uint64_t>(j, "n_pairs");
    c.seed = seed();
    c.validate();
    return c;
}

PairSpectrum RunConfig::sps_spectrum() const
{
    auto const& j = at("sps").at("spectrum");
    auto const kind = get<std::string>(j, "kind");
    PumpConfig const p = pump();
    if (kind == "gaussian")
        return gaussian_pair_spectrum(p.center_wavelength_nm, get<double>(j, "center_nm"), get<double>(j, "fwhm_nm"),
                                      get<Eigen::Index>(j, "nodes"));
    if (kind == "lines") {
        PairSpectrum s;
        s.pump_wavelength_nm = p.center_wavelength_nm;
        for (double l : j.at("lines_nm").get<std::vector<double>>())
            s.lines.push_back({l, 1.0});
        s.validate();
        return s;
    }
    if (kind == "ln_thin_film") {
        CrystalConfig const c = crystal();
        auto const nodes = get<Eigen::Index>(j, "nodes");
        double const lo = get<double>(j, "start_nm");
        PairSpectrum s;
        s.pump_wavelength_nm = p.center_wavelength_nm;
        s.wavelength_nm = Eigen::ArrayXd::LinSpaced(nodes, lo, conjugate_wavelength_nm(p.center_wavelength_nm, lo));
        s.density.resize(nodes);
        for (Eigen::Index k = 0; k < nodes; ++k)
            s.density[k] = emission_intensity(p, c, s.wavelength_nm[k], 0.0, IdlerIntegration::quadrature);
        s.validate();
        return s;
    }
    throw ConfigError("config: sps.spectrum.kind must be 'gaussian', 'lines' or 'ln_thin_film'");
}

EfficiencyWindow RunConfig::sps_efficiency() const
{
    auto const& j = at("sps").at("efficiency");
    auto const kind = get<std::string>(j, "kind");
    EfficiencyWindow w;
    if (kind == "table") {
        auto const path = resolve_data_path(get<std::string>(j, "table"));
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open efficiency table '" + path.string() + "'");
        w = read_efficiency_csv(in);
    } else if (kind == "gaussian") {
        w.shape = EfficiencyWindow::Shape::gaussian;
        w.center_nm = get<double>(j, "center_nm");
        w.fwhm_nm = get<double>(j, "fwhm_nm");
    } else if (kind != "flat") {
        throw ConfigError("config: sps.efficiency.kind must be 'flat', 'gaussian' or 'table'");
    }
    w.peak = get<double>(j, "peak");
    auto const band = j.at("passband_nm").get<std::vector<double>>();
    if (band.size() != 2)
        throw ConfigError("config: sps.efficiency.passband_nm needs two entries");
    w.passband_min_nm = band[0];
    w.passband_max_nm = band[1];
    w.validate();
    return w;
}

std::vector<double> RunConfig::sps_calibration_nm() const
{
    auto points = at("sps").at("calibration_nm").get<std::vector<double>>();
    if (points.empty())
        points = scenarios::sps_calibration_wavelengths(pump().center_wavelength_nm);
    return points;
}

SetScanConfig RunConfig::set_scan() const
{
    auto const& j = at("set");
    SetScanConfig c;
    c.seed_min_nm = get<double>(j, "seed_min_nm");
    c.seed_max_nm = get<double>(j, "seed_max_nm");
    c.seed_step_nm = get<double>(j, "seed_step_nm");
    c.resolution_nm = get<double>(j, "resolution_nm");
    c.signal_span_hz = get<double>(j, "signal_span_thz") * 1e12;
    c.signal_nodes = get<Eigen::Index>(j, "signal_nodes");
    c.shg_artifact = get<bool>(j, "shg_artifact");
    c.artifact_amplitude = get<double>(j, "artifact_amplitude");
    c.validate();
    return c;
}

bool RunConfig::set_compare_direct() const
{
    return get<bool>(at("set"), "compare_direct");
}

}  // namespace spdc::cli
