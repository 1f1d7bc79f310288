#pragma once

// Reference formulas typed in independently of the library, for use as test oracles.

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

inline constexpr double c = 299792458.0;
inline constexpr double pi = std::numbers::pi;

// Three-term Sellmeier n^2 = 1 + sum B l^2 / (l^2 - C), l in um.
struct Sellmeier
{
    std::vector<std::array<double, 2>> terms;

    double n(double nm) const
    {
        double const l2 = nm * nm * 1e-6;
        double n2 = 1.0;
        for (auto const& [b, cc] : terms)
            n2 += b * l2 / (l2 - cc);
        return std::sqrt(n2);
    }

    // Analytic n - l dn/dl.
    double group_index(double nm) const
    {
        double const l = nm * 1e-3;
        double const l2 = l * l;
        double dn2 = 0.0;
        for (auto const& [b, cc] : terms)
            dn2 += -2.0 * b * cc * l / ((l2 - cc) * (l2 - cc));
        double const nn = n(nm);
        return nn - l * dn2 / (2.0 * nn);
    }
};

inline Sellmeier const fused_silica{{{0.6961663, 0.0684043 * 0.0684043},
                                     {0.4079426, 0.1162414 * 0.1162414},
                                     {0.8974794, 9.896161 * 9.896161}}};
inline Sellmeier const mgo_ln_e{{{2.2454, 0.01242}, {1.3005, 0.05313}, {6.8972, 331.33}}};
inline Sellmeier const mgo_ln_o{{{2.4272, 0.01478}, {1.4617, 0.05612}, {9.6536, 371.216}}};
inline Sellmeier const bbo_o{{{0.90291, 0.003926}, {0.83155, 0.018786}, {0.76536, 60.01}}};
inline Sellmeier const bbo_e{{{1.151075, 0.007142}, {0.21803, 0.02259}, {0.656, 263.0}}};

inline double k(Sellmeier const& m, double nm) { return 2.0 * pi * m.n(nm) / (nm * 1e-9); }

inline double conjugate_nm(double pump_nm, double signal_nm) { return 1.0 / (1.0 / pump_nm - 1.0 / signal_nm); }

}  // namespace oracle
