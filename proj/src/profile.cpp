#include "spdc/profile.hpp"

#include <string>

#include "spdc/errors.hpp"

namespace spdc {

Fwhm fwhm(Eigen::Ref<Eigen::ArrayXd const> const& x, Eigen::Ref<Eigen::ArrayXd const> const& y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw ConfigError("fwhm: need at least two samples of matching size");
    Eigen::Index peak = 0;
    double const top = y.maxCoeff(&peak);
    if (!(top > 0.0))
        throw NumericalError("fwhm: profile has no positive maximum");
    double const half = 0.5 * top;
    Eigen::Index const n = y.size();

    Fwhm out;
    Eigen::Index j = peak;
    while (j > 0 && y[j - 1] >= half)
        --j;
    if (j == 0) {
        out.lower = x[0];
        out.range_limited = true;
    } else {
        out.lower = x[j - 1] + (half - y[j - 1]) * (x[j] - x[j - 1]) / (y[j] - y[j - 1]);
    }

    j = peak;
    while (j < n - 1 && y[j + 1] >= half)
        ++j;
    if (j == n - 1) {
        out.upper = x[n - 1];
        out.range_limited = true;
    } else {
        out.upper = x[j] + (y[j] - half) * (x[j + 1] - x[j]) / (y[j] - y[j + 1]);
    }
    out.width = std::abs(out.upper - out.lower);
    return out;
}

int count_nulls(Eigen::Ref<Eigen::ArrayXd const> const& y, double rel_threshold)
{
    if (y.size() < 3)
        return 0;
    double const limit = rel_threshold * y.maxCoeff();
    int n = 0;
    for (Eigen::Index j = 1; j + 1 < y.size(); ++j) {
        // Flat-bottomed minima count once, at their left edge.
        if (y[j] < limit && y[j] < y[j - 1] && y[j] <= y[j + 1])
            ++n;
    }
    return n;
}

double trapezoid(Eigen::Ref<Eigen::ArrayXd const> const& x, Eigen::Ref<Eigen::ArrayXd const> const& y)
{
    if (x.size() != y.size())
        throw ConfigError("trapezoid: size mismatch");
    double sum = 0.0;
    for (Eigen::Index i = 1; i < x.size(); ++i)
        sum += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
    return sum;
}

void UniformAxis::validate(char const* what) const
{
    if (count < 2)
        throw ConfigError(std::string(what) + ": axis needs at least 2 nodes");
    if (!(stop > start))
        throw ConfigError(std::string(what) + ": axis must be strictly ascending");
}

Eigen::ArrayXd UniformAxis::nodes() const
{
    return Eigen::ArrayXd::LinSpaced(count, start, stop);
}

}  // namespace spdc
