#pragma once

#include <functional>
#include <string>
#include <vector>

#include "spdc/dispersion.hpp"

namespace spdc::validation {

struct CriterionResult
{
    int id = 0;
    std::string title;
    bool passed = false;
    std::string detail;  // measured values against their targets
    double elapsed_s = 0.0;
    double budget_s = 0.0;
};

CriterionResult coherence_length(MaterialLibrary const& lib);
CriterionResult thickness_oscillation(MaterialLibrary const& lib);
CriterionResult spectral_breadth(MaterialLibrary const& lib);
CriterionResult entanglement(MaterialLibrary const& lib);
CriterionResult schmidt_oracle();
CriterionResult counting_statistics();
CriterionResult car_regime();
CriterionResult sps_round_trip(MaterialLibrary const& lib);
CriterionResult set_self_consistency(MaterialLibrary const& lib);
CriterionResult polarization_law();

/// Runs every criterion in order; `report` is called after each one.
std::vector<CriterionResult> run_all(MaterialLibrary const& lib,
                                     std::function<void(CriterionResult const&)> const& report = {});

/// "PASS [3] title (1.2 s / 60 s): detail"
std::string format(CriterionResult const& result);

}  // namespace spdc::validation
