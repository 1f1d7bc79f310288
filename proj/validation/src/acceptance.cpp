#include "spdc/validation/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include <Eigen/QR>

#include "spdc/validation/scenarios.hpp"

namespace spdc::validation {

namespace {

using Clock = std::chrono::steady_clock;

// Collects the pass/fail state and a detail line for one criterion.
class Tally
{
  public:
    Tally(int id, std::string title, double budget_s) : start_(Clock::now())
    {
        result_.id = id;
        result_.title = std::move(title);
        result_.budget_s = budget_s;
        result_.passed = true;
    }

    template <typename... Args>
    void check(bool ok, char const* fmt, Args... args)
    {
        char buf[256];
        std::snprintf(buf, sizeof buf, fmt, args...);
        if (!result_.detail.empty())
            result_.detail += "; ";
        result_.detail += buf;
        if (!ok) {
            result_.detail += " [FAIL]";
            result_.passed = false;
        }
    }

    CriterionResult finish()
    {
        result_.elapsed_s = std::chrono::duration<double>(Clock::now() - start_).count();
        if (result_.elapsed_s > result_.budget_s) {
            result_.passed = false;
            result_.detail += "; over runtime budget [FAIL]";
        }
        return result_;
    }

    CriterionResult fail(std::exception const& e)
    {
        result_.passed = false;
        if (!result_.detail.empty())
            result_.detail += "; ";
        result_.detail += std::string("error: ") + e.what();
        auto r = finish();
        r.passed = false;
        return r;
    }

  private:
    CriterionResult result_;
    Clock::time_point start_;
};

template <typename Body>
CriterionResult run(int id, char const* title, double budget_s, Body&& body)
{
    Tally t(id, title, budget_s);
    try {
        body(t);
    } catch (std::exception const& e) {
        return t.fail(e);
    }
    return t.finish();
}

}  // namespace

CriterionResult coherence_length(MaterialLibrary const& lib)
{
    return run(1, "Coherence length", 1.0, [&](Tally& t) {
        double const lc_um = scenarios::ln_coherence_length_m(lib) * 1e6;
        double const rel = std::abs(lc_um - 1.37) / 1.37;
        t.check(rel <= 0.10, "L_c = %.4f um vs 1.37 um (rel %.3f, tol 0.10)", lc_um, rel);
    });
}

CriterionResult thickness_oscillation(MaterialLibrary const& lib)
{
    return run(2, "Thickness oscillation", 1.0, [&](Tally& t) {
        double const lc = scenarios::ln_coherence_length_m(lib);
        auto const [s, i] = scenarios::ln_degenerate_modes();
        Eigen::ArrayXd const multiples = Eigen::ArrayXd::LinSpaced(5, 1.0, 5.0);
        auto const scan =
            thickness_scan(scenarios::ln_pump(), scenarios::ln_crystal(lib, lc), multiples * lc, s, i);
        double const peak = scan.rate.maxCoeff();
        double const zero2 = scan.rate[1] / peak;
        double const zero4 = scan.rate[3] / peak;
        double const spread = (scan.rate[0] - scan.rate[2]) / peak;
        double const spread5 = (scan.rate[0] - scan.rate[4]) / peak;
        t.check(zero2 < 1e-6 && zero4 < 1e-6, "rate(2L_c)/peak = %.2e, rate(4L_c)/peak = %.2e (tol 1e-6)", zero2,
                zero4);
        t.check(std::abs(spread) <= 1e-9 && std::abs(spread5) <= 1e-9,
                "peaks L_c/3L_c/5L_c differ by %.2e, %.2e relative (tol 1e-9)", spread, spread5);
    });
}

CriterionResult spectral_breadth(MaterialLibrary const& lib)
{
    return run(3, "Spectral breadth contrast", 60.0, [&](Tally& t) {
        auto const ln = scenarios::ln_map(lib, 1.0);
        auto const bbo = scenarios::bbo_map(lib);
        auto const ln_grid = frequency_angular_map(ln.pump, ln.crystal, ln.grid);
        auto const bbo_grid = frequency_angular_map(bbo.pump, bbo.crystal, bbo.grid);
        auto const ln_cut = degenerate_cut(ln_grid, ln.pump.center_wavelength_nm);
        auto const bbo_cut = degenerate_cut(bbo_grid, bbo.pump.center_wavelength_nm);
        double const ratio = ln_cut.spectral.width / bbo_cut.spectral.width;
        t.check(ln_grid.intensity.rows() == bbo_grid.intensity.rows() &&
                    ln_grid.intensity.cols() == bbo_grid.intensity.cols(),
                "grids %ldx%ld", static_cast<long>(ln_grid.intensity.rows()),
                static_cast<long>(ln_grid.intensity.cols()));
        t.check(!bbo_cut.spectral.range_limited, "BBO FWHM %.1f nm at %.2f deg", bbo_cut.spectral.width,
                bbo_cut.angle_deg);
        t.check(ratio >= 10.0, "LN FWHM %s%.1f nm at %.2f deg, ratio %.2f (need >= 10)",
                ln_cut.spectral.range_limited ? ">= " : "", ln_cut.spectral.width, ln_cut.angle_deg, ratio);
    });
}

CriterionResult entanglement(MaterialLibrary const& lib)
{
    return run(4, "Entanglement (Fedorov ratio, Schmidt number)", 60.0, [&](Tally& t) {
        auto scenario = scenarios::ln_jsi(lib);
        scenario.pump.spectral_width = scenarios::calibrate_jsi_sigma(scenario);
        auto const report = entanglement_report(compute_jsi(scenario.pump, scenario.crystal, scenario.grid));
        double const delta = report.widths.conditional.fwhm_hz;
        t.check(std::abs(delta - 0.6e12) < 1e-3 * 0.6e12, "sigma = %.4e rad/s gives delta = %.4f THz",
                scenario.pump.spectral_width, delta * 1e-12);
        t.check(report.fedorov_ratio >= 20.0, "Delta = %s%.2f THz, R = %.2f (need >= 20)",
                report.widths.unconditional.range_limited ? ">= " : "", report.widths.unconditional.fwhm_hz * 1e-12,
                report.fedorov_ratio);
        double const rk = report.fedorov_ratio / report.schmidt_number;
        t.check(rk >= 0.5 && rk <= 2.0, "K = %.2f, R/K = %.3f (need [0.5, 2])", report.schmidt_number, rk);
    });
}

CriterionResult schmidt_oracle()
{
    return run(5, "Schmidt number oracle", 10.0, [&](Tally& t) {
        // Amplitude exp(-(x+y)^2/(4a^2) - (x-y)^2/(4b^2)) with r = a/b has Schmidt
        // eigenvalues (1 - mu^2) mu^(2n), mu = (r - 1)/(r + 1), so K = (1 + r^2)/(2r).
        Eigen::Index const n = 512;
        for (double r : {1.0, 1.5, 2.5, 4.0, 6.0}) {
            double const a = 1.0;
            double const b = a / r;
            JointSpectralGrid g;
            g.omega_s = Eigen::ArrayXd::LinSpaced(n, -5.0, 5.0);
            g.omega_i = g.omega_s;
            g.intensity.resize(n, n);
            for (Eigen::Index p = 0; p < n; ++p) {
                for (Eigen::Index q = 0; q < n; ++q) {
                    double const u = g.omega_s[p] + g.omega_i[q];
                    double const v = g.omega_s[p] - g.omega_i[q];
                    g.intensity(p, q) = std::exp(-u * u / (2 * a * a) - v * v / (2 * b * b));
                }
            }
            double const k = schmidt_number(g);
            double const exact = (1 + r * r) / (2 * r);
            double const rel = std::abs(k - exact) / exact;
            t.check(rel <= 0.02, "r=%.1f K=%.4f exact %.4f", r, k, exact);
        }
    });
}

CriterionResult counting_statistics()
{
    return run(6, "Counting statistics", 120.0, [&](Tally& t) {
        double const tc = default_coincidence_window_s;
        for (auto const& source : scenarios::counting_configurations()) {
            auto const m = measure(synthesize_stream(source), tc);
            double const expected = scenarios::analytic_g2(source, tc);
            double const z = (m.summary.g2_zero - expected) / m.g2_stderr;
            t.check(std::abs(z) <= 3.0, "g2 %.4g vs %.4g (%.2f se)", m.summary.g2_zero, expected, z);
        }
        auto const powers = scenarios::power_sweep_powers();
        auto const sweep = power_sweep(scenarios::power_sweep_source(), 1.0, powers, tc);
        Eigen::ArrayXd p(static_cast<Eigen::Index>(sweep.size()));
        Eigen::ArrayXd excess(p.size());
        Eigen::ArrayXd real(p.size());
        for (Eigen::Index j = 0; j < p.size(); ++j) {
            p[j] = sweep[j].power;
            excess[j] = sweep[j].measurement.summary.g2_zero - 1.0;
            real[j] = sweep[j].measurement.summary.real;
        }
        auto const slope = fit_power_law(p, excess);
        auto const linear = fit_power_law(p, real);
        t.check(std::abs(slope.exponent + 1.0) <= 0.05, "slope of g2-1 vs P = %.4f (need -1 +- 0.05)",
                slope.exponent);
        t.check(std::abs(linear.exponent - 1.0) <= 0.05, "N_r ~ P^%.4f (need 1 +- 0.05)", linear.exponent);
    });
}

CriterionResult car_regime()
{
    return run(7, "CAR regime", 60.0, [&](Tally& t) {
        auto const source = scenarios::car_1400_source();
        double const analytic = scenarios::analytic_g2(source, default_coincidence_window_s) - 1.0;
        auto const m = measure(synthesize_stream(source));
        double const rel = std::abs(m.summary.car - 1400.0) / 1400.0;
        t.check(std::abs(analytic - 1400.0) < 1.0, "analytic CAR %.1f", analytic);
        t.check(rel <= 0.10, "Monte-Carlo CAR %.1f vs 1400 (rel %.3f, tol 0.10)", m.summary.car, rel);
    });
}

namespace {

// FWHM of the wavelength seen by detector 1: half the pair weight at lambda
// plus half the weight of the pairs whose partner is at lambda.
double detector_one_fwhm(PairSpectrum const& s, EfficiencyWindow const& eff)
{
    auto weight = [&](double l) {
        auto const& x = s.wavelength_nm;
        if (l < x[0] || l > x[x.size() - 1])
            return 0.0;
        Eigen::Index j = 0;
        while (j + 2 < x.size() && x[j + 1] < l)
            ++j;
        double const f = (l - x[j]) / (x[j + 1] - x[j]);
        return ((1 - f) * s.density[j] + f * s.density[j + 1]) * eff.pair(l, s.conjugate_nm(l));
    };
    double const lo = s.wavelength_nm.minCoeff();
    double const hi = std::max(s.wavelength_nm.maxCoeff(), s.conjugate_nm(lo));
    Eigen::ArrayXd const l = Eigen::ArrayXd::LinSpaced(20001, std::min(lo, s.conjugate_nm(hi)), hi);
    Eigen::ArrayXd p(l.size());
    for (Eigen::Index k = 0; k < l.size(); ++k) {
        double const c = s.conjugate_nm(l[k]);
        p[k] = 0.5 * (weight(l[k]) + weight(c) * c * c / (l[k] * l[k]));
    }
    return fwhm(l, p).width;
}

}  // namespace

CriterionResult sps_round_trip(MaterialLibrary const& lib)
{
    return run(8, "SPS round trip", 60.0, [&](Tally& t) {
        auto const config = scenarios::sps_config(lib);
        double const pump_nm = 405.0;
        auto const curve = calibrate(
            model_calibration_points(config, pump_nm, scenarios::sps_calibration_wavelengths(pump_nm)),
            2.0 * pump_nm);

        EfficiencyWindow const flat;
        auto const gauss = gaussian_pair_spectrum(pump_nm, 2.0 * pump_nm, 60.0);
        auto const rec = reconstruct_spectrum(simulate_sps(gauss, flat, config), curve);
        double const expected = detector_one_fwhm(gauss, flat);
        double const got = fwhm(rec.wavelength_nm, rec.density).width;
        double const rel = std::abs(got - expected) / expected;
        t.check(rel <= 0.10, "round trip FWHM %.1f nm vs %.1f nm (rel %.3f, tol 0.10)", got, expected, rel);

        auto const film = scenarios::ln_thin_film_spectrum(lib);
        auto const window = scenarios::spad_longpass_efficiency();
        auto const film_rec = reconstruct_spectrum(simulate_sps(film, window, config), curve);
        double const width = fwhm(film_rec.wavelength_nm, film_rec.density).width;
        t.check(std::abs(width - 200.0) <= 30.0, "thin-film width %.1f nm vs 200 nm +- 15%%", width);

        double const tau200 = correlation_time(bandwidth_hz(200.0, 810.0)) * 1e15;
        double const tau600 = correlation_time(bandwidth_hz(600.0, 810.0)) * 1e15;
        t.check(tau200 / 10.0 <= 1.5 && 10.0 / tau200 <= 1.5, "tau_c(200 nm) = %.2f fs vs 10 fs", tau200);
        t.check(tau600 / 3.0 <= 1.5 && 3.0 / tau600 <= 1.5, "tau_c(600 nm) = %.2f fs vs 3 fs", tau600);
    });
}

CriterionResult set_self_consistency(MaterialLibrary const& lib)
{
    return run(9, "SET self-consistency", 120.0, [&](Tally& t) {
        auto scenario = scenarios::ln_jsi(lib);
        scenario.pump.spectral_width = scenarios::calibrate_jsi_sigma(scenario);
        auto const direct = compute_jsi(scenario.pump, scenario.crystal, scenario.grid);
        auto const reconstructed = simulate_set(scenarios::fine_set_scan(), scenario.pump, scenario.crystal);
        auto const cmp = compare_jsi(direct, reconstructed);
        t.check(cmp.rms < 0.05, "normalised RMS %.4f (need < 0.05), relative L2 %.4f over %ld nodes", cmp.rms,
                cmp.relative_l2, static_cast<long>(cmp.nodes));
    });
}

CriterionResult polarization_law()
{
    return run(10, "Polarization law", 1.0, [&](Tally& t) {
        Eigen::ArrayXd const theta = Eigen::ArrayXd::LinSpaced(19, 0.0, 180.0);
        Eigen::ArrayXd z(theta.size());
        double y_max = 0.0;
        for (Eigen::Index j = 0; j < theta.size(); ++j) {
            z[j] = polarization_response(theta[j], Analyzer::z);
            y_max = std::max(y_max, std::abs(polarization_response(theta[j], Analyzer::y)));
        }
        // Least squares z = A sin^2(theta) + C.
        Eigen::MatrixXd a(theta.size(), 2);
        a.col(0) = (theta * pi / 180.0).sin().square().matrix();
        a.col(1).setOnes();
        Eigen::VectorXd const coef = a.colPivHouseholderQr().solve(z.matrix());
        double const ss_res = (a * coef - z.matrix()).squaredNorm();
        double const ss_tot = (z - z.mean()).square().sum();
        double const r2 = 1.0 - ss_res / ss_tot;
        t.check(r2 > 0.999, "sin^2 fit R^2 = %.6f (need > 0.999)", r2);
        t.check(y_max == 0.0, "max y-analysed response %.1e", y_max);
    });
}

std::vector<CriterionResult> run_all(MaterialLibrary const& lib,
                                     std::function<void(CriterionResult const&)> const& report)
{
    std::vector<CriterionResult> out;
    auto add = [&](CriterionResult r) {
        if (report)
            report(r);
        out.push_back(std::move(r));
    };
    add(coherence_length(lib));
    add(thickness_oscillation(lib));
    add(spectral_breadth(lib));
    add(entanglement(lib));
    add(schmidt_oracle());
    add(counting_statistics());
    add(car_regime());
    add(sps_round_trip(lib));
    add(set_self_consistency(lib));
    add(polarization_law());
    return out;
}

std::string format(CriterionResult const& r)
{
    char head[160];
    std::snprintf(head, sizeof head, "%s [%d] %s (%.2f s / %.0f s): ", r.passed ? "PASS" : "FAIL", r.id,
                  r.title.c_str(), r.elapsed_s, r.budget_s);
    return head + r.detail;
}

}  // namespace spdc::validation
