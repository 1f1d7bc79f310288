#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "spdc/counting.hpp"
#include "spdc/jsi.hpp"
#include "spdc/set.hpp"
#include "spdc/spectra.hpp"
#include "spdc/sps.hpp"

namespace spdc::cli {

using nlohmann::json;

std::vector<std::string> preset_names();
json const& defaults_document();
/// Throws ConfigError for unknown names.
json const& preset_document(std::string const& name);

/*!
 * Resolved run configuration: defaults, then the preset, then the config
 * file, each applied as a JSON merge patch. Keys absent from the defaults
 * document are rejected, as are values whose JSON type differs from the
 * default's.
 */
class RunConfig
{
  public:
    static RunConfig resolve(std::optional<std::string> const& preset,
                             std::optional<std::filesystem::path> const& config_file,
                             std::optional<std::uint64_t> seed_override);

    json const& document() const { return doc_; }
    std::uint64_t seed() const;

    MaterialLibrary const& materials() const { return materials_; }
    PumpConfig pump() const;
    /// Thickness in coherence lengths is resolved against the degenerate
    /// collinear mismatch of the configured pump.
    CrystalConfig crystal() const;
    SpectrumGridSpec spectrum_grid() const;
    double null_threshold() const;
    Eigen::ArrayXd thickness_multiples() const;
    JsiGridSpec jsi_grid() const;
    double jsi_target_conditional_hz() const;
    std::pair<double, double> jsi_sigma_bracket() const;
    SourceConfig source() const;
    double coincidence_window_s() const;
    double histogram_bin_ps() const;
    double histogram_max_lag_ps() const;
    std::string timetag_format() const;
    double reference_power() const;
    std::vector<double> powers() const;
    Eigen::ArrayXd polarization_angles() const;
    SpsConfig sps() const;
    PairSpectrum sps_spectrum() const;
    EfficiencyWindow sps_efficiency() const;
    std::vector<double> sps_calibration_nm() const;
    SetScanConfig set_scan() const;
    bool set_compare_direct() const;

  private:
    json doc_;
    MaterialLibrary materials_;

    json const& at(char const* section) const;
};

}  // namespace spdc::cli
