#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "spdc/errors.hpp"
#include "spdc/units.hpp"

namespace spdc {

enum class PolarizationAxis { ordinary, extraordinary };

char const* to_string(PolarizationAxis axis);
PolarizationAxis polarization_axis_from_string(std::string_view text);

/*!
 * Generalised Sellmeier model for one polarisation axis, wavelength in um:
 *
 *   n^2 = constant + sum_j B_j l^2 / (l^2 - C_j) + sum_j P_j / (l^2 - Q_j)
 *         + quadratic * l^2
 *
 * covering both the three-resonance form and the Kato/Eimerl style
 * two-pole-plus-IR-correction form.
 */
struct SellmeierModel
{
    double constant = 1.0;
    std::vector<std::array<double, 2>> resonances;  // {B, C}
    std::vector<std::array<double, 2>> poles;       // {P, Q}
    double quadratic = 0.0;
    double min_wavelength_nm = 0.0;
    double max_wavelength_nm = 0.0;

    bool contains(double wavelength_nm) const
    {
        return wavelength_nm >= min_wavelength_nm && wavelength_nm <= max_wavelength_nm;
    }

    template <typename Scalar>
    Scalar index_squared(Scalar wavelength_um) const
    {
        Scalar const l2 = wavelength_um * wavelength_um;
        Scalar n2 = Scalar(constant) + Scalar(quadratic) * l2;
        for (auto const& [b, c] : resonances)
            n2 += Scalar(b) * l2 / (l2 - Scalar(c));
        for (auto const& [p, q] : poles)
            n2 += Scalar(p) / (l2 - Scalar(q));
        return n2;
    }
};

/// Named dispersion model with one Sellmeier model per polarisation axis.
class Material
{
  public:
    Material(std::string name, SellmeierModel ordinary, SellmeierModel extraordinary, std::string source = {});

    std::string const& name() const { return name_; }
    std::string const& source() const { return source_; }
    SellmeierModel const& model(PolarizationAxis axis) const;

    static Material vacuum();

  private:
    std::string name_;
    std::string source_;
    SellmeierModel ordinary_;
    SellmeierModel extraordinary_;
};

using MaterialPtr = std::shared_ptr<Material const>;

/// Refractive index; throws RangeError outside the model's validity range.
double refractive_index(Material const& material, PolarizationAxis axis, double wavelength_nm);

/// Array overload, range-checked element-wise.
Eigen::ArrayXd refractive_index(Material const& material, PolarizationAxis axis,
                                Eigen::Ref<Eigen::ArrayXd const> const& wavelength_nm);

/*!
 * Index seen by a wave whose propagation direction makes `optic_axis_angle`
 * (rad) with the optic axis of a uniaxial crystal. Ordinary waves ignore the
 * angle; extraordinary waves use 1/n^2 = cos^2/n_o^2 + sin^2/n_e^2, so an
 * angle of pi/2 gives n_e.
 */
double refractive_index(Material const& material, PolarizationAxis axis, double wavelength_nm,
                        double optic_axis_angle);

/// k = n(omega) omega / c in rad/m.
double wavenumber(Material const& material, PolarizationAxis axis, double angular_frequency,
                  double optic_axis_angle = pi / 2);

// Step of the centred difference used for dn/dlambda.
inline constexpr double group_index_step_nm = 0.1;

/// n_g = n - lambda dn/dlambda (centred difference, step group_index_step_nm).
double group_index(Material const& material, PolarizationAxis axis, double wavelength_nm);

/// Group delay length * n_g / c in seconds.
double group_delay(Material const& material, PolarizationAxis axis, double wavelength_nm, double propagation_length_m);

// Material data files: `key = value` lines, '#' comments. Keys: name, source,
// axis (ordinary | extraordinary | isotropic) which opens a coefficient block,
// and inside a block: constant, resonance B C, pole P Q, quadratic, range_nm
// min max. Unknown keys are rejected.
Material parse_material(std::string_view text, std::string_view origin = "<memory>");
Material load_material(std::filesystem::path const& path);

/// Directory from SPDC_MATERIALS_DIR, else the compiled-in data directory.
std::filesystem::path default_materials_directory();

class MaterialLibrary
{
  public:
    MaterialLibrary() = default;

    /// Loads every `*.mat` file in `directory`.
    static MaterialLibrary load_directory(std::filesystem::path const& directory);
    static MaterialLibrary load_default();

    void add(Material material);
    MaterialPtr get(std::string const& name) const;
    bool contains(std::string const& name) const { return materials_.count(name) != 0; }
    std::vector<std::string> names() const;

  private:
    std::map<std::string, MaterialPtr> materials_;
};

}  // namespace spdc
