#pragma once

#include <Eigen/Core>

namespace spdc {

// Full width at half maximum of a sampled 1-D profile around its global
// maximum. Half-maximum crossings are located by linear interpolation
// between nodes. If the profile does not fall below half maximum before an
// end of the axis, that side is clamped to the axis end and the result is
// flagged as range limited.
struct Fwhm
{
    double width = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    bool range_limited = false;
};

Fwhm fwhm(Eigen::Ref<Eigen::ArrayXd const> const& x, Eigen::Ref<Eigen::ArrayXd const> const& y);

/// Interior local minima of y that fall below rel_threshold * max(y).
int count_nulls(Eigen::Ref<Eigen::ArrayXd const> const& y, double rel_threshold = 0.05);

// Trapezoid integral of y over the (not necessarily uniform) nodes x.
double trapezoid(Eigen::Ref<Eigen::ArrayXd const> const& x, Eigen::Ref<Eigen::ArrayXd const> const& y);

// Evenly spaced closed axis [start, stop] with `count` nodes.
struct UniformAxis
{
    double start = 0.0;
    double stop = 1.0;
    Eigen::Index count = 2;

    void validate(char const* what) const;
    Eigen::ArrayXd nodes() const;
    double step() const { return (stop - start) / static_cast<double>(count - 1); }
};

}  // namespace spdc
