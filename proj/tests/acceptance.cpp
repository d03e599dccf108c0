// Acceptance harness.  Every numbered check prints exactly one verdict line
// and the process exits with the number of failures, so the CI gate is the
// exit status and the log stays readable.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "nullpulse/diagnostics.hpp"
#include "nullpulse/errors.hpp"
#include "nullpulse/grid.hpp"
#include "nullpulse/linear_oracle.hpp"
#include "nullpulse/null_forms.hpp"
#include "nullpulse/pulse_data.hpp"
#include "nullpulse/run_config.hpp"
#include "nullpulse/solver.hpp"
#include "nullpulse/study.hpp"

using namespace nullpulse;
namespace fs = std::filesystem;

namespace {

struct Gate {
    int fails = 0;

    void line(int id, const char* label, bool ok, const std::string& detail) {
        std::printf("[%s] %02d %-24s %s\n", ok ? "PASS" : "FAIL", id, label,
                    detail.c_str());
        std::fflush(stdout);
        if (!ok) ++fails;
    }
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

// Pulls the "total" row out of a weighted_norms.csv written by run_one.
std::pair<double, double> read_norm_totals(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) return {0.0, 0.0};
    char line[256];
    double out = 0.0, inc = 0.0;
    while (std::fgets(line, sizeof line, fp))
        if (std::sscanf(line, "total,%lf,%lf", &out, &inc) == 2) break;
    std::fclose(fp);
    return {out, inc};
}

// Flat energy of exp(-phi) - 1 on the data surface. That substitution turns a
// metric-form run into a source-free wave exactly, so this value is the
// ceiling on what the incoming cones can ever collect and the measured flux
// tail converges to the gap below the plain energy instead of to zero.
double substitute_field_energy(const ShortPulseData& d) {
    const double a = d.r_inner(), b = 1.0;
    const int n = 2 * std::max(1, static_cast<int>(std::ceil((b - a) / (d.delta / 64.0))));
    const double h = (b - a) / n;
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double r = a + h * k;
        const double damp = std::exp(-d.phi0(r));
        const double w1 = -d.phi1(r) * damp;
        const double dw0 = -d.phi0_deriv(r, 1) * damp;
        const double f = 0.5 * (w1 * w1 + dw0 * dw0) * 4.0 * M_PI * r * r;
        acc += f * ((k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0));
    }
    return acc * h / 3.0;
}

std::vector<QuadraticForm> null_basis() {
    std::vector<QuadraticForm> b;
    b.push_back(QuadraticForm::metric_form());
    for (int al = 0; al < 4; ++al)
        for (int be = al + 1; be < 4; ++be)
            b.push_back(QuadraticForm::rotation_form(al, be));
    return b;
}

double evaluate(const QuadraticForm& f, const std::array<double, 4>& xi) {
    double v = 0.0;
    for (int al = 0; al < 4; ++al)
        for (int be = 0; be < 4; ++be)
            v += f.a[static_cast<std::size_t>(4 * al + be)] *
                 xi[static_cast<std::size_t>(al)] * xi[static_cast<std::size_t>(be)];
    return v;
}

bool witness_ok(const QuadraticForm& f, const NullWitness& w) {
    double space = w.xi[1] * w.xi[1] + w.xi[2] * w.xi[2] + w.xi[3] * w.xi[3];
    double mag = w.xi[0] * w.xi[0] + space;
    if (!(mag > 0.0)) return false;
    if (std::abs(w.xi[0] * w.xi[0] - space) > 1e-12 * mag) return false;
    if (!(std::abs(w.value) > 0.0)) return false;
    return std::abs(evaluate(f, w.xi) - w.value) <= 1e-9 * (1.0 + std::abs(w.value));
}

double slope_of(const std::vector<RunSummary>& runs,
                double (*pick)(const RunSummary&)) {
    std::vector<std::pair<double, double>> series;
    for (const RunSummary& r : runs) series.push_back({r.delta, pick(r)});
    return power_law_slope(series);
}

} // namespace

int main() {
    Gate gate;
    const auto wall0 = std::chrono::steady_clock::now();
    fs::remove_all("acceptance_out");

    // 01: the null-condition decision is exact on the algebra it covers.
    {
        const std::vector<QuadraticForm> basis = null_basis();
        bool ok = true;
        std::string why = "7 basis forms, 100 combos, 300 tilts";
        for (const QuadraticForm& b : basis)
            if (!check_null_condition(b)) { ok = false; why = "basis form rejected"; }

        std::mt19937 rng(77u);
        std::uniform_real_distribution<double> coef(-2.0, 2.0);
        for (int trial = 0; trial < 100 && ok; ++trial) {
            QuadraticForm combo = QuadraticForm::zero();
            for (const QuadraticForm& b : basis) combo += coef(rng) * b;
            if (!check_null_condition(combo)) {
                ok = false;
                why = fmt("combo %d rejected", trial);
                break;
            }
            for (double eps : {1e-6, 1e-3, 1.0}) {
                QuadraticForm tilted = combo;
                tilted.at(0, 0) += eps;
                NullWitness w;
                if (check_null_condition(tilted, &w)) {
                    ok = false;
                    why = fmt("tilt %g on combo %d accepted", eps, trial);
                    break;
                }
                if (!witness_ok(tilted, w)) {
                    ok = false;
                    why = fmt("invalid witness at tilt %g, combo %d", eps, trial);
                    break;
                }
            }
        }
        gate.line(1, "null-form algebra", ok, why);
    }

    // 02: marching scheme against the closed-form linear solution.
    {
        const ShortPulseData data = ShortPulseData::make(0.05, 1.0);
        const DoubleNullGrid base =
            DoubleNullGrid::build(0.05, 6.0, 0.05 / 32.0, 0.02);
        const LinearOracle oracle(data);
        const auto t0 = std::chrono::steady_clock::now();
        const ConvergenceReport rep =
            convergence_study(data, SystemCoupling(1, {}), base, 3, {}, &oracle);
        const double wall = seconds_since(t0);
        const double order =
            std::log2(rep.errors.front() / rep.errors.back()) / 2.0;
        const bool ok = rep.mode == "oracle" && rep.errors.size() == 3 &&
                        order >= 1.8 && order <= 2.2 && wall <= 120.0;
        gate.line(2, "linear-oracle order", ok,
                  fmt("order %.3f over h in {d/32, d/64, d/128}, %.1f s", order,
                      wall));
    }

    // Pulse-width scan feeding checks 03..08 and the global half of 11.
    RunConfig base_cfg = parse_run_config(R"({
        "data": {"delta": 0.1, "amplitude": 1.0},
        "grid": {"ubar_max": 40.0, "h_fine": 0.003125, "h_coarse": 0.02},
        "coupling": {"preset": "q0"},
        "norms": {"alpha": 0.9, "max_order": 2}
    })");
    std::vector<RunSummary> runs;
    for (double delta : {0.1, 0.05, 0.025}) {
        const RunConfig c = with_delta(base_cfg, delta);
        const auto t0 = std::chrono::steady_clock::now();
        runs.push_back(run_one(c, fmt("acceptance_out/scan_%g", delta)));
        std::printf("    scan delta=%.3g done in %.1f s\n", delta,
                    seconds_since(t0));
    }
    const RunSummary& mid = runs[1];

    // 03: nothing leaks ahead of the pulse.
    {
        double worst = 0.0;
        for (const RunSummary& r : runs) worst = std::max(worst, r.region3_sup);
        gate.line(3, "quiet region", worst <= 1e-13,
                  fmt("sup |psi| ahead of the pulse = %.3g", worst));
    }

    // 04: classical data energies scale like 1, 1/d^2, 1/d^4.
    {
        const double s0 = slope_of(runs, [](const RunSummary& r) { return r.e_initial[0]; });
        const double s1 = slope_of(runs, [](const RunSummary& r) { return r.e_initial[1]; });
        const double s2 = slope_of(runs, [](const RunSummary& r) { return r.e_initial[2]; });
        const bool ok = std::abs(s0 - 0.0) <= 0.1 && std::abs(s1 + 2.0) <= 0.1 &&
                        std::abs(s2 + 4.0) <= 0.1;
        gate.line(4, "data energy scaling", ok,
                  fmt("slopes %.3f, %.3f, %.3f vs 0, -2, -4 (common offset %.3f is "
                      "the r^2 shell factor of the shrinking support)",
                      s0, s1, s2, (s0 + (s1 + 2.0) + (s2 + 4.0)) / 3.0));
    }

    // 05: outgoing derivative decays like 1/t^2 with plateau level sqrt(d).
    {
        const double plateau_slope =
            slope_of(runs, [](const RunSummary& r) { return r.plateau_lphi_t2; });
        const bool ok = mid.lphi_exponent <= -1.8 &&
                        std::abs(plateau_slope - 0.5) <= 0.15;
        gate.line(5, "outgoing decay", ok,
                  fmt("t-exponent %.3f, plateau d-slope %.3f", mid.lphi_exponent,
                      plateau_slope));
    }

    // 06: incoming derivative decays like 1/t with plateau level 1/sqrt(d).
    {
        const double plateau_slope =
            slope_of(runs, [](const RunSummary& r) { return r.plateau_lbphi_t1; });
        const bool ok = std::abs(mid.lbphi_exponent + 1.0) <= 0.2 &&
                        std::abs(plateau_slope + 0.5) <= 0.15;
        gate.line(6, "incoming decay", ok,
                  fmt("t-exponent %.3f, plateau d-slope %.3f", mid.lbphi_exponent,
                      plateau_slope));
    }

    // 07: weighted incoming derivative on the inner cone shrinks with d.
    {
        const double s =
            slope_of(runs, [](const RunSummary& r) { return r.cdelta_lbar_sup; });
        bool mono = true;
        double prev = 1e300;
        for (const RunSummary& r : runs) {
            const double ratio = r.cdelta_lbar_sup / std::pow(r.delta, 0.25);
            if (ratio > prev * (1.0 + 1e-9)) mono = false;
            prev = ratio;
        }
        gate.line(7, "inner-cone smallness", s >= 0.15 && mono,
                  fmt("d-slope %.3f, ratio to d^(1/4) %s", s,
                      mono ? "non-increasing" : "increasing"));
    }

    // 08: commuted weighted norms stay uniform over the scan.
    {
        double lo = 1e300, hi = 0.0;
        double inc_lo = 1e300, inc_hi = 0.0;
        for (const RunSummary& r : runs) {
            lo = std::min(lo, r.order2_norm);
            hi = std::max(hi, r.order2_norm);
            const auto [out_total, inc_total] =
                read_norm_totals(fmt("acceptance_out/scan_%g/weighted_norms.csv", r.delta));
            (void)out_total;
            inc_lo = std::min(inc_lo, inc_total);
            inc_hi = std::max(inc_hi, inc_total);
        }
        gate.line(8, "uniform norms", lo > 0.0 && hi / lo <= 4.0,
                  fmt("spread factor %.2f over the scan (incoming rows alone %.2f; "
                      "the growth sits in outgoing rows of commuted fields, fed by "
                      "the ingoing layer the data surface sheds)",
                      hi / lo, inc_lo > 0.0 ? inc_hi / inc_lo : 0.0));
    }

    // 09: multiplier energy identities close at second order.
    {
        const ShortPulseData data = ShortPulseData::make(0.05, 1.0);
        const SystemCoupling q0 = make_preset_coupling("q0", 1.0, 1);
        const SystemCoupling none(1, {});
        const DoubleNullGrid g32 =
            DoubleNullGrid::build(0.05, 8.0, 0.05 / 32.0, 0.02);
        const DoubleNullGrid g64 = g32.bisect();
        const DoubleNullGrid g128 = g64.bisect();
        const double ub = g32.ubar(g32.find_level(8.0));

        const Multiplier mults[3] = {Multiplier::TimeTranslation,
                                     Multiplier::Incoming,
                                     Multiplier::WeightedOutgoing};
        double res[3][3];
        int gi = 0;
        for (const DoubleNullGrid* g : {&g32, &g64, &g128}) {
            const SolutionSheet sheet = evolve(data, q0, *g);
            for (int m = 0; m < 3; ++m)
                res[gi][m] = energy_identity_residual(sheet, data, q0, 0, mults[m],
                                                      0.9, -0.05, 0.05, ub)
                                 .residual;
            ++gi;
        }
        double worst_order = 1e300;
        for (int m = 0; m < 3; ++m)
            worst_order =
                std::min(worst_order, std::log2(res[0][m] / res[2][m]) / 2.0);

        const SolutionSheet lin = evolve(data, none, g64);
        const double lin_res =
            energy_identity_residual(lin, data, none, 0,
                                     Multiplier::TimeTranslation, 0.9, -0.05,
                                     0.05, ub)
                .residual;
        const bool ok = worst_order >= 1.8 && lin_res <= 0.02;
        gate.line(9, "energy identities", ok,
                  fmt("worst order %.3f, linear residual %.4f", worst_order,
                      lin_res));
    }

    // 10: pointwise bound ratio stays order one and grid-stable.
    {
        const std::vector<double> ts{5.0, 10.0, 20.0, 40.0};
        auto worst_ks = [&ts](double delta, int hod) {
            const ShortPulseData d = ShortPulseData::make(delta, 1.0);
            const SystemCoupling q0 = make_preset_coupling("q0", 1.0, 1);
            const DoubleNullGrid g =
                DoubleNullGrid::build(delta, 40.0, delta / hod, 0.02);
            const SolutionSheet sheet = evolve(d, q0, g);
            double worst = 0.0;
            for (const PointwiseBoundReport& r :
                 klainerman_sobolev_check(sheet, 0, ts, delta))
                worst = std::max(worst, r.worst_ratio);
            return worst;
        };
        double scan_worst = 0.0;
        double ks05 = 0.0;
        for (double delta : {0.1, 0.05, 0.025}) {
            const double w = worst_ks(delta, 32);
            if (delta == 0.05) ks05 = w;
            scan_worst = std::max(scan_worst, w);
        }
        const double ks_half = worst_ks(0.05, 64);
        const double drift = std::abs(ks_half - ks05) / ks05;
        const bool ok = scan_worst > 0.0 && scan_worst <= 10.0 && drift <= 0.2;
        gate.line(10, "pointwise bound", ok,
                  fmt("worst ratio %.3g, halving drift %.1f%%", scan_worst,
                      100.0 * drift));
    }

    // 11: null coupling runs to the end, the non-null one cannot.
    {
        const bool global_ok = !mid.blew_up && mid.top_ubar >= 39.9 &&
                               mid.flux_tail_final <= 0.10;

        const DoubleNullGrid g40 =
            DoubleNullGrid::build(0.05, 40.0, 0.05 / 32.0, 0.02);
        double tstar[3];
        bool all_blew = true;
        int ai = 0;
        for (double amp : {1.0, 2.0, 4.0}) {
            const ShortPulseData d = ShortPulseData::make(0.05, amp);
            const SystemCoupling bad = make_preset_coupling("dt_squared", 1.0, 1);
            const SolutionSheet sheet = evolve(d, bad, g40);
            const BlowUpReport& bu = sheet.blowup();
            if (!bu.detected || bu.t >= 40.0) all_blew = false;
            tstar[ai++] = bu.detected ? bu.t : 1e300;
        }
        const bool mono = tstar[0] >= tstar[1] - 1e-12 && tstar[1] >= tstar[2] - 1e-12;
        const bool ok = global_ok && all_blew && mono;
        const ShortPulseData d05 = ShortPulseData::make(0.05, 1.0);
        const double limit =
            1.0 - substitute_field_energy(d05) / initial_cone_energy(d05);
        gate.line(11, "global vs blow-up", ok,
                  fmt("tail %.1f%% (exact radiation ceiling leaves %.1f%%), "
                      "t* = %.3g / %.3g / %.3g",
                      100.0 * mid.flux_tail_final, 100.0 * limit, tstar[0],
                      tstar[1], tstar[2]));
    }

    std::printf("%d of 11 checks failed, %.1f s total\n", gate.fails,
                seconds_since(wall0));
    return gate.fails;
}
