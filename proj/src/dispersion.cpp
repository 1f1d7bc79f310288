#include "spdc/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>

namespace spdc {

char const* to_string(PolarizationAxis axis)
{
    return axis == PolarizationAxis::ordinary ? "ordinary" : "extraordinary";
}

PolarizationAxis polarization_axis_from_string(std::string_view text)
{
    if (text == "ordinary" || text == "o")
        return PolarizationAxis::ordinary;
    if (text == "extraordinary" || text == "e")
        return PolarizationAxis::extraordinary;
    throw ConfigError("unknown polarization axis '" + std::string(text) + "'");
}

Material::Material(std::string name, SellmeierModel ordinary, SellmeierModel extraordinary, std::string source)
    : name_(std::move(name)), source_(std::move(source)), ordinary_(std::move(ordinary)),
      extraordinary_(std::move(extraordinary))
{
    for (auto const* m : {&ordinary_, &extraordinary_}) {
        if (!(m->min_wavelength_nm > 0.0) || !(m->max_wavelength_nm > m->min_wavelength_nm))
            throw ConfigError("material '" + name_ + "': invalid validity range");
    }
}

SellmeierModel const& Material::model(PolarizationAxis axis) const
{
    return axis == PolarizationAxis::ordinary ? ordinary_ : extraordinary_;
}

Material Material::vacuum()
{
    SellmeierModel m;
    m.constant = 1.0;
    m.min_wavelength_nm = 1.0;
    m.max_wavelength_nm = 1e9;
    return Material("vacuum", m, m, "definition");
}

namespace {

[[noreturn]] void throw_range(Material const& material, PolarizationAxis axis, double wavelength_nm)
{
    auto const& m = material.model(axis);
    std::ostringstream msg;
    msg << "material '" << material.name() << "' (" << to_string(axis) << "): wavelength " << wavelength_nm
        << " nm outside validity range [" << m.min_wavelength_nm << ", " << m.max_wavelength_nm << "] nm";
    throw RangeError(msg.str());
}

}  // namespace

double refractive_index(Material const& material, PolarizationAxis axis, double wavelength_nm)
{
    auto const& m = material.model(axis);
    if (!m.contains(wavelength_nm))
        throw_range(material, axis, wavelength_nm);
    return std::sqrt(m.index_squared(wavelength_nm * 1e-3));
}

Eigen::ArrayXd refractive_index(Material const& material, PolarizationAxis axis,
                                Eigen::Ref<Eigen::ArrayXd const> const& wavelength_nm)
{
    return wavelength_nm.unaryExpr([&](double l) { return refractive_index(material, axis, l); });
}

double refractive_index(Material const& material, PolarizationAxis axis, double wavelength_nm, double optic_axis_angle)
{
    if (axis == PolarizationAxis::ordinary)
        return refractive_index(material, axis, wavelength_nm);
    double const no = refractive_index(material, PolarizationAxis::ordinary, wavelength_nm);
    double const ne = refractive_index(material, PolarizationAxis::extraordinary, wavelength_nm);
    double const c = std::cos(optic_axis_angle);
    double const s = std::sin(optic_axis_angle);
    return 1.0 / std::sqrt(c * c / (no * no) + s * s / (ne * ne));
}

double wavenumber(Material const& material, PolarizationAxis axis, double angular_frequency, double optic_axis_angle)
{
    double const wavelength_nm = angular_frequency_to_wavelength_nm(angular_frequency);
    double const n = refractive_index(material, axis, wavelength_nm, optic_axis_angle);
    return n * angular_frequency / speed_of_light;
}

double group_index(Material const& material, PolarizationAxis axis, double wavelength_nm)
{
    auto const& m = material.model(axis);
    double const h = group_index_step_nm;
    if (!m.contains(wavelength_nm - h) || !m.contains(wavelength_nm + h))
        throw_range(material, axis, wavelength_nm);
    double const n = refractive_index(material, axis, wavelength_nm);
    double const dn = (refractive_index(material, axis, wavelength_nm + h)
                       - refractive_index(material, axis, wavelength_nm - h))
                      / (2.0 * h);
    return n - wavelength_nm * dn;
}

double group_delay(Material const& material, PolarizationAxis axis, double wavelength_nm, double propagation_length_m)
{
    if (!(propagation_length_m > 0.0))
        throw ConfigError("group_delay: propagation length must be positive");
    return propagation_length_m * group_index(material, axis, wavelength_nm) / speed_of_light;
}

//---------------------------------------------------------------------------//
// Material files
//---------------------------------------------------------------------------//

namespace {

std::string_view trim(std::string_view s)
{
    auto const first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    auto const last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<double> parse_numbers(std::string_view value, std::string const& where)
{
    std::vector<double> out;
    std::istringstream in{std::string(value)};
    std::string token;
    while (in >> token) {
        char* end = nullptr;
        double const v = std::strtod(token.c_str(), &end);
        if (end != token.c_str() + token.size() || !std::isfinite(v))
            throw ConfigError(where + ": not a number '" + token + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace

Material parse_material(std::string_view text, std::string_view origin)
{
    std::string name;
    std::string source;
    std::optional<SellmeierModel> ordinary;
    std::optional<SellmeierModel> extraordinary;

    enum class Block { none, ordinary, extraordinary, isotropic };
    Block block = Block::none;
    SellmeierModel current;
    bool has_range = false;

    auto where = [&](std::size_t line_no) { return std::string(origin) + ":" + std::to_string(line_no); };

    auto close_block = [&](std::size_t line_no) {
        if (block == Block::none)
            return;
        if (!has_range)
            throw ConfigError(where(line_no) + ": axis block without range_nm");
        if (block == Block::ordinary || block == Block::isotropic) {
            if (ordinary)
                throw ConfigError(where(line_no) + ": ordinary axis defined twice");
            ordinary = current;
        }
        if (block == Block::extraordinary || block == Block::isotropic) {
            if (extraordinary)
                throw ConfigError(where(line_no) + ": extraordinary axis defined twice");
            extraordinary = current;
        }
        block = Block::none;
    };

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto const eol = text.find('\n', pos);
        std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (auto const hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;

        auto const eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(where(line_no) + ": expected 'key = value'");
        std::string const key{trim(line.substr(0, eq))};
        std::string_view const value = trim(line.substr(eq + 1));

        if (key == "name") {
            name = value;
        } else if (key == "source") {
            source = value;
        } else if (key == "axis") {
            close_block(line_no);
            if (value == "ordinary")
                block = Block::ordinary;
            else if (value == "extraordinary")
                block = Block::extraordinary;
            else if (value == "isotropic")
                block = Block::isotropic;
            else
                throw ConfigError(where(line_no) + ": unknown axis '" + std::string(value) + "'");
            current = SellmeierModel{};
            has_range = false;
        } else if (key == "constant" || key == "resonance" || key == "pole" || key == "quadratic"
                   || key == "range_nm") {
            if (block == Block::none)
                throw ConfigError(where(line_no) + ": '" + key + "' outside an axis block");
            auto const nums = parse_numbers(value, where(line_no));
            std::size_t const expected = (key == "constant" || key == "quadratic") ? 1 : 2;
            if (nums.size() != expected)
                throw ConfigError(where(line_no) + ": '" + key + "' expects " + std::to_string(expected)
                                  + " number(s)");
            if (key == "constant")
                current.constant = nums[0];
            else if (key == "quadratic")
                current.quadratic = nums[0];
            else if (key == "resonance")
                current.resonances.push_back({nums[0], nums[1]});
            else if (key == "pole")
                current.poles.push_back({nums[0], nums[1]});
            else {
                current.min_wavelength_nm = nums[0];
                current.max_wavelength_nm = nums[1];
                has_range = true;
            }
        } else {
            throw ConfigError(where(line_no) + ": unknown key '" + key + "'");
        }
    }
    close_block(line_no);

    if (name.empty())
        throw ConfigError(std::string(origin) + ": missing 'name'");
    if (!ordinary || !extraordinary)
        throw ConfigError(std::string(origin) + ": both polarization axes must be defined");
    return Material(name, *ordinary, *extraordinary, source);
}

Material load_material(std::filesystem::path const& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open material file " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_material(buffer.str(), path.string());
}

std::filesystem::path default_materials_directory()
{
    if (char const* env = std::getenv("SPDC_MATERIALS_DIR"); env && *env)
        return env;
#ifdef SPDC_DEFAULT_MATERIALS_DIR
    return SPDC_DEFAULT_MATERIALS_DIR;
#else
    return "data/materials";
#endif
}

MaterialLibrary MaterialLibrary::load_directory(std::filesystem::path const& directory)
{
    if (!std::filesystem::is_directory(directory))
        throw ConfigError("material directory not found: " + directory.string());
    std::vector<std::filesystem::path> files;
    for (auto const& entry : std::filesystem::directory_iterator(directory)) {
        if (entry.is_regular_file() && entry.path().extension() == ".mat")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    MaterialLibrary lib;
    for (auto const& f : files)
        lib.add(load_material(f));
    return lib;
}

MaterialLibrary MaterialLibrary::load_default()
{
    return load_directory(default_materials_directory());
}

void MaterialLibrary::add(Material material)
{
    auto name = material.name();
    if (materials_.count(name))
        throw ConfigError("duplicate material '" + name + "'");
    materials_.emplace(std::move(name), std::make_shared<Material const>(std::move(material)));
}

MaterialPtr MaterialLibrary::get(std::string const& name) const
{
    auto const it = materials_.find(name);
    if (it == materials_.end())
        throw ConfigError("unknown material '" + name + "'");
    return it->second;
}

std::vector<std::string> MaterialLibrary::names() const
{
    std::vector<std::string> out;
    for (auto const& [name, _] : materials_)
        out.push_back(name);
    return out;
}

}  // namespace spdc
