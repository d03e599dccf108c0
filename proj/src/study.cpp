#include "nullpulse/study.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nullpulse/diagnostics.hpp"
#include "nullpulse/errors.hpp"
#include "nullpulse/linear_oracle.hpp"
#include "nullpulse/solver.hpp"

namespace nullpulse {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string g17(double v) {
    char b[40];
    std::snprintf(b, sizeof(b), "%.17g", v);
    return b;
}

std::string gshort(double v) {
    char b[40];
    std::snprintf(b, sizeof(b), "%g", v);
    return b;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw input_error("cannot write " + path);
    out << content;
    out.flush();
    if (!out) throw input_error("short write to " + path);
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> log_spaced(double lo, double hi, int n) {
    std::vector<double> out;
    if (!(hi > lo) || !(lo > 0.0) || n < 2) return out;
    double la = std::log(lo), lb = std::log(hi);
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        out.push_back(std::exp(la + (lb - la) * k / (n - 1)));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::string hex64(std::uint64_t h) {
    char b[17];
    std::snprintf(b, sizeof(b), "%016llx", static_cast<unsigned long long>(h));
    return b;
}

// Residual of the outgoing second derivative on the data surface,
// sup_r |(2/r) phi0'(r) - Q|, with Q evaluated on the surface values of the
// null derivatives.  The data construction cancels the first outgoing
// derivative exactly; this measures how far the second one is from zero.
double second_order_residual_sup(const ShortPulseData& data,
                                 const SystemCoupling& coupling) {
    int nf = data.n_fields;
    std::vector<double> lp(static_cast<std::size_t>(nf), 0.0);
    std::vector<double> lb(static_cast<std::size_t>(nf), 0.0);
    std::vector<double> src(static_cast<std::size_t>(nf), 0.0);
    double r0 = data.r_inner();
    int n = 4096;
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        double r = r0 + (k + 0.5) * (1.0 - r0) / n;
        double d1 = data.phi0_deriv(r, 1);
        for (int f = 0; f < nf; ++f) lb[static_cast<std::size_t>(f)] = -2.0 * d1;
        coupling.source(lp.data(), lb.data(), src.data());
        worst = std::max(worst, std::fabs(2.0 * d1 / r - src[0]));
    }
    return worst;
}

struct Csv {
    std::ostringstream ss;
    bool line_open = false;

    void cell(const std::string& s) {
        if (line_open) ss << ',';
        ss << s;
        line_open = true;
    }
    void cell(double v) { cell(g17(v)); }
    void cell(int v) { cell(std::to_string(v)); }
    void end_row() {
        ss << '\n';
        line_open = false;
    }
    void header(std::initializer_list<const char*> names) {
        for (const char* n : names) cell(std::string(n));
        end_row();
    }
    std::string str() const { return ss.str(); }
};

struct Verdict {
    std::string name;
    double measured = 0.0;
    double lo = -1e300, hi = 1e300;
    bool pass = false;
};

Verdict check_band(const std::string& name, double measured, double lo, double hi) {
    Verdict v;
    v.name = name;
    v.measured = measured;
    v.lo = lo;
    v.hi = hi;
    v.pass = measured >= lo && measured <= hi;
    return v;
}

int write_verdicts(const std::string& path, const std::vector<Verdict>& vs) {
    Csv csv;
    csv.header({"name", "measured", "lo", "hi", "pass"});
    int fails = 0;
    for (const Verdict& v : vs) {
        csv.cell(v.name);
        csv.cell(v.measured);
        csv.cell(v.lo <= -1e300 ? std::string("") : g17(v.lo));
        csv.cell(v.hi >= 1e300 ? std::string("") : g17(v.hi));
        csv.cell(v.pass ? 1 : 0);
        csv.end_row();
        if (!v.pass) ++fails;
        std::printf("  %-32s measured %-12.5g %s\n", v.name.c_str(), v.measured,
                    v.pass ? "ok" : "OUT OF BAND");
    }
    write_file(path, csv.str());
    return fails;
}

} // namespace

double power_law_slope(const std::vector<std::pair<double, double>>& series) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (const auto& p : series) {
        if (!(p.first > 0.0) || !(p.second > 0.0) || !std::isfinite(p.second))
            throw fit_error("power-law slope needs positive finite samples");
        double x = std::log(p.first), y = std::log(p.second);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) throw fit_error("power-law slope needs at least 2 samples");
    double det = n * sxx - sx * sx;
    if (det <= 0.0) throw fit_error("degenerate abscissas in power-law slope");
    return (n * sxy - sx * sy) / det;
}

RunConfig with_delta(const RunConfig& base, double delta) {
    RunConfig c = base;
    c.data = ShortPulseData::make(delta, base.data.amplitude, base.data.profile,
                                  base.data.n_fields);
    c.h_fine = delta / base.study.h_over_delta;
    if (c.coupling_preset != "custom")
        c.coupling = make_preset_coupling(c.coupling_preset, c.coupling_scale,
                                          c.data.n_fields);
    return c;
}

RunConfig with_amplitude_preset(const RunConfig& base, double amplitude,
                                const std::string& preset) {
    RunConfig c = base;
    c.data = ShortPulseData::make(base.data.delta, amplitude, base.data.profile,
                                  base.data.n_fields);
    c.coupling_preset = preset;
    c.coupling = make_preset_coupling(preset, c.coupling_scale, c.data.n_fields);
    return c;
}

RunSummary run_one(const RunConfig& c, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const double delta = c.data.delta;
    DoubleNullGrid grid =
        DoubleNullGrid::build(delta, c.ubar_max, c.h_fine, c.h_coarse, c.u_cap);
    std::string fp = config_fingerprint(c);
    std::string ckdir = out_dir + "/checkpoint";

    SolutionSheet sheet(grid, c.data.n_fields);
    if (fs::exists(ckdir + "/manifest.json")) {
        try {
            sheet = load_checkpoint(grid, ckdir, fp);
            std::printf("resuming from checkpoint at level %d\n",
                        sheet.valid_levels());
        } catch (const std::exception& e) {
            std::printf("checkpoint not usable (%s), starting fresh\n", e.what());
            sheet = SolutionSheet(grid, c.data.n_fields);
        }
    }

    EvolutionParams params;
    if (c.checkpoint_every > 0) {
        params.progress_every = c.checkpoint_every;
        params.progress = [&ckdir, &fp](const SolutionSheet& s, int level) {
            (void)level;
            write_checkpoint(s, ckdir, fp);
        };
    }

    auto clock0 = std::chrono::steady_clock::now();
    continue_march(sheet, c.data, c.coupling, params);
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                clock0)
                      .count();

    RunSummary s;
    s.delta = delta;
    s.amplitude = c.data.amplitude;
    const BlowUpReport& bu = sheet.blowup();
    s.blew_up = bu.detected;
    int top = sheet.valid_levels() - 1;
    s.top_ubar = grid.ubar(top);
    s.t_star = bu.detected ? bu.t : s.top_ubar;
    s.region3_sup = vacuum_region_sup(sheet);
    for (int k = 0; k < 3; ++k)
        s.e_initial[k] = initial_classical_energy(c.data, k, delta / 32.0);
    s.initial_energy = initial_cone_energy(c.data);
    std::printf("marched %lld nodes to ubar = %.4g in %.1f s%s\n",
                static_cast<long long>(grid.node_count()), s.top_ubar, wall,
                bu.detected ? " (stopped by blow-up)" : "");

    // Time-slice sup norms and the decay fits they feed.
    double t_top = s.top_ubar - delta;
    std::vector<double> ts = log_spaced(1.5, t_top, 48);
    std::vector<std::array<SupSample, 3>> sups;
    {
        Csv csv;
        csv.header({"t", "sup_phi", "u_phi", "ubar_phi", "sup_lphi", "u_lphi",
                    "ubar_lphi", "sup_lbarphi", "u_lbarphi", "ubar_lbarphi"});
        for (double t : ts) {
            ConeSlice sl = extract_cone(grid, SliceKind::TimeSlice, t);
            std::array<SupSample, 3> row = {
                sup_on_slice(sheet, 0, sl, Quantity::Phi),
                sup_on_slice(sheet, 0, sl, Quantity::LPhi),
                sup_on_slice(sheet, 0, sl, Quantity::LbarPhi)};
            csv.cell(t);
            for (const SupSample& sample : row) {
                csv.cell(sample.value);
                csv.cell(sample.u);
                csv.cell(sample.ubar);
            }
            csv.end_row();
            sups.push_back(row);
        }
        write_file(out_dir + "/supnorm.csv", csv.str());
    }

    {
        double w_lo = c.decay_t_lo;
        double w_hi = std::min(c.decay_t_hi, t_top);
        Csv csv;
        csv.header({"quantity", "exponent", "amplitude", "rms", "n", "window_lo",
                    "window_hi", "compensated_power", "plateau_median"});
        const char* names[2] = {"lphi", "lbarphi"};
        const double comp[2] = {2.0, 1.0};
        for (int qi = 0; qi < 2; ++qi) {
            std::vector<std::pair<double, double>> series;
            std::vector<double> compensated;
            for (std::size_t k = 0; k < ts.size(); ++k) {
                double v = sups[k][static_cast<std::size_t>(qi + 1)].value;
                series.emplace_back(ts[k], v);
                if (ts[k] >= w_lo - 1e-12 && ts[k] <= w_hi + 1e-12)
                    compensated.push_back(std::pow(ts[k], comp[qi]) * v);
            }
            double plateau = median(compensated);
            DecayFit fit;
            bool have_fit = false;
            try {
                fit = fit_decay(series, w_lo, w_hi);
                have_fit = true;
            } catch (const fit_error& e) {
                std::printf("decay fit for %s skipped: %s\n", names[qi], e.what());
            }
            csv.cell(std::string(names[qi]));
            csv.cell(have_fit ? fit.exponent : 0.0);
            csv.cell(have_fit ? fit.amplitude : 0.0);
            csv.cell(have_fit ? fit.rms : 0.0);
            csv.cell(fit.n);
            csv.cell(w_lo);
            csv.cell(w_hi);
            csv.cell(comp[qi]);
            csv.cell(plateau);
            csv.end_row();
            if (qi == 0) {
                s.lphi_exponent = have_fit ? fit.exponent : 0.0;
                s.plateau_lphi_t2 = plateau;
            } else {
                s.lbphi_exponent = have_fit ? fit.exponent : 0.0;
                s.plateau_lbphi_t1 = plateau;
            }
        }
        write_file(out_dir + "/decay_fits.csv", csv.str());
    }

    // Incoming flux accounting.
    {
        Csv csv;
        csv.header({"ubar", "remaining", "fraction"});
        int stride = std::max(1, (top + 1) / 200);
        std::vector<FluxTailPoint> tail = flux_tail(sheet, 0, c.data, stride);
        for (const FluxTailPoint& p : tail) {
            csv.cell(p.ubar);
            csv.cell(p.remaining);
            csv.cell(p.remaining / s.initial_energy);
            csv.end_row();
        }
        if (!tail.empty())
            s.flux_tail_final = tail.back().remaining / s.initial_energy;
        write_file(out_dir + "/flux_incoming.csv", csv.str());
    }

    // Inner-cone certificate.
    if (s.top_ubar > 1.0 - delta + 4.0 * c.h_fine) {
        Csv csv;
        csv.header({"word", "deriv", "weight_power", "sup", "at_ubar"});
        for (const CertificateRow& row :
             cdelta_certificate(sheet, 0, delta, s.top_ubar)) {
            csv.cell(row.word);
            csv.cell(row.deriv);
            csv.cell(row.weight_power);
            csv.cell(row.sup);
            csv.cell(row.at_ubar);
            if (row.word == "1" && row.deriv == "Lbar") s.cdelta_lbar_sup = row.sup;
            csv.end_row();
        }
        write_file(out_dir + "/cdelta_certificate.csv", csv.str());
    }

    // Weighted commuted norms at the inner cone and the top level.
    if (s.top_ubar > 1.0 - delta + 4.0 * c.h_fine) {
        Csv csv;
        csv.header({"order", "outgoing", "incoming"});
        double out_total = 0.0, in_total = 0.0;
        for (int k = 0; k <= c.max_order; ++k) {
            double ek = outgoing_cone_norm(sheet, 0, k, delta, s.top_ubar, c.alpha,
                                           delta);
            double ebk = incoming_cone_norm(sheet, 0, k, s.top_ubar, delta, delta);
            out_total += ek;
            in_total += ebk;
            csv.cell(k);
            csv.cell(ek);
            csv.cell(ebk);
            csv.end_row();
        }
        csv.cell(std::string("total"));
        csv.cell(out_total);
        csv.cell(in_total);
        csv.end_row();
        csv.cell(std::string("initial"));
        csv.cell(initial_weighted_norm(c.data, c.coupling, c.max_order, c.alpha));
        csv.cell(0.0);
        csv.end_row();
        s.order2_norm = out_total + in_total;
        write_file(out_dir + "/weighted_norms.csv", csv.str());
    }

    // Multiplier energy identities on the pulse strip.
    {
        double ubx = std::min(c.identity_ubar, s.top_ubar);
        if (ubx >= 1.5) {
            ubx = grid.ubar(grid.find_level(ubx));
            Csv csv;
            csv.header({"multiplier", "lhs", "rhs", "residual", "flux_out_late",
                        "flux_in_top", "flux_out_early", "surface", "bulk"});
            const Multiplier mults[3] = {Multiplier::TimeTranslation,
                                         Multiplier::Incoming,
                                         Multiplier::WeightedOutgoing};
            for (int mi = 0; mi < 3; ++mi) {
                IdentityBalance b =
                    energy_identity_residual(sheet, c.data, c.coupling, 0,
                                             mults[mi], c.alpha, -delta, delta, ubx);
                csv.cell(to_string(mults[mi]));
                csv.cell(b.lhs);
                csv.cell(b.rhs);
                csv.cell(b.residual);
                csv.cell(b.flux_out_late);
                csv.cell(b.flux_in_top);
                csv.cell(b.flux_out_early);
                csv.cell(b.surface);
                csv.cell(b.bulk);
                csv.end_row();
                s.identity_residual[mi] = b.residual;
                s.identity_worst = std::max(s.identity_worst, b.residual);
            }
            write_file(out_dir + "/energy_identity.csv", csv.str());
        }
    }

    // Pointwise bound ratios on late slices.
    {
        std::vector<double> kts;
        for (double t : {5.0, 10.0, 20.0, 40.0})
            if (t <= t_top) kts.push_back(t);
        Csv csv;
        csv.header({"t", "worst_ratio", "u", "ubar", "boundary_value",
                    "word_norm_sum", "n_points"});
        for (const PointwiseBoundReport& rep :
             klainerman_sobolev_check(sheet, 0, kts, delta)) {
            csv.cell(rep.t);
            csv.cell(rep.worst_ratio);
            csv.cell(rep.u);
            csv.cell(rep.ubar);
            csv.cell(rep.boundary_value);
            csv.cell(rep.word_norm_sum);
            csv.cell(rep.n_points);
            csv.end_row();
            s.ks_worst = std::max(s.ks_worst, rep.worst_ratio);
        }
        write_file(out_dir + "/pointwise_bound.csv", csv.str());
    }

    // Quiet-region check.
    {
        Csv csv;
        csv.header({"sup_psi"});
        csv.cell(s.region3_sup);
        csv.end_row();
        write_file(out_dir + "/region3.csv", csv.str());
    }

    if (bu.detected) {
        Csv csv;
        csv.header({"level", "u", "ubar", "t", "quantity", "peak"});
        csv.cell(bu.level);
        csv.cell(bu.u);
        csv.cell(bu.ubar);
        csv.cell(bu.t);
        csv.cell(bu.quantity);
        csv.cell(bu.peak);
        csv.end_row();
        write_file(out_dir + "/blowup.csv", csv.str());
    }

    {
        json man;
        man["format"] = "nullpulse-run-1";
        man["config"] = json::parse(canonical_json(c));
        man["fingerprint"] = fp;
        man["grid"] = {{"hash", hex64(grid.content_hash())},
                       {"master_size", grid.master_size()},
                       {"levels", grid.levels()},
                       {"iu_max", grid.iu_max()},
                       {"nodes", grid.node_count()}};
        man["valid_levels"] = sheet.valid_levels();
        man["top_ubar"] = s.top_ubar;
        if (bu.detected) {
            man["blowup"] = {{"level", bu.level}, {"u", bu.u},     {"ubar", bu.ubar},
                             {"t", bu.t},         {"peak", bu.peak},
                             {"quantity", bu.quantity}};
        } else {
            man["blowup"] = nullptr;
        }
        man["initial_energy"] = s.initial_energy;
        man["data_surface_second_order_sup"] =
            second_order_residual_sup(c.data, c.coupling);
        write_file(out_dir + "/manifest.json", man.dump(2) + "\n");
    }

    return s;
}

int cmd_run(const RunConfig& c, const std::string& out_dir) {
    RunSummary s = run_one(c, out_dir);
    std::printf("delta %.4g amplitude %.4g: %s, top ubar %.4g\n", s.delta,
                s.amplitude, s.blew_up ? "blow-up" : "complete", s.top_ubar);
    std::printf("  region3 sup %.3e, Lphi exponent %.3f, Lbarphi exponent %.3f\n",
                s.region3_sup, s.lphi_exponent, s.lbphi_exponent);
    std::printf("  flux tail fraction %.4f, worst identity residual %.3e\n",
                s.flux_tail_final, s.identity_worst);
    return 0;
}

int cmd_study(const RunConfig& c, const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::vector<RunSummary> runs;
    for (double d : c.study.deltas) {
        RunConfig sub = with_delta(c, d);
        std::string dir = out_dir + "/delta_" + gshort(d);
        std::printf("study: delta = %g -> %s\n", d, dir.c_str());
        runs.push_back(run_one(sub, dir));
    }

    Csv csv;
    csv.header({"delta", "e0", "e1", "e2", "lphi_exponent", "plateau_lphi_t2",
                "lbphi_exponent", "plateau_lbphi_t1", "cdelta_lbar_sup",
                "order2_norm", "ks_worst", "identity_worst", "region3_sup",
                "flux_tail_final", "blew_up", "t_star"});
    for (const RunSummary& r : runs) {
        csv.cell(r.delta);
        csv.cell(r.e_initial[0]);
        csv.cell(r.e_initial[1]);
        csv.cell(r.e_initial[2]);
        csv.cell(r.lphi_exponent);
        csv.cell(r.plateau_lphi_t2);
        csv.cell(r.lbphi_exponent);
        csv.cell(r.plateau_lbphi_t1);
        csv.cell(r.cdelta_lbar_sup);
        csv.cell(r.order2_norm);
        csv.cell(r.ks_worst);
        csv.cell(r.identity_worst);
        csv.cell(r.region3_sup);
        csv.cell(r.flux_tail_final);
        csv.cell(r.blew_up ? 1 : 0);
        csv.cell(r.t_star);
        csv.end_row();
    }
    write_file(out_dir + "/study_summary.csv", csv.str());

    auto slope_of = [&](auto pick) {
        std::vector<std::pair<double, double>> series;
        for (const RunSummary& r : runs) series.emplace_back(r.delta, pick(r));
        return power_law_slope(series);
    };

    std::vector<Verdict> vs;
    vs.push_back(check_band("energy_exponent_0",
                            slope_of([](const RunSummary& r) { return r.e_initial[0]; }),
                            -0.1, 0.1));
    vs.push_back(check_band("energy_exponent_1",
                            slope_of([](const RunSummary& r) { return r.e_initial[1]; }),
                            -2.1, -1.9));
    vs.push_back(check_band("energy_exponent_2",
                            slope_of([](const RunSummary& r) { return r.e_initial[2]; }),
                            -4.1, -3.9));

    const RunSummary& mid = runs[runs.size() / 2];
    vs.push_back(check_band("lphi_decay_exponent", mid.lphi_exponent, -1e300, -1.8));
    vs.push_back(check_band("lbphi_decay_exponent", mid.lbphi_exponent, -1.2, -0.8));
    vs.push_back(check_band(
        "plateau_lphi_delta_exponent",
        slope_of([](const RunSummary& r) { return r.plateau_lphi_t2; }), 0.35, 0.65));
    vs.push_back(check_band(
        "plateau_lbphi_delta_exponent",
        slope_of([](const RunSummary& r) { return r.plateau_lbphi_t1; }), -0.65,
        -0.35));
    vs.push_back(check_band(
        "cdelta_delta_exponent",
        slope_of([](const RunSummary& r) { return r.cdelta_lbar_sup; }), 0.15, 1e300));
    {
        bool mono = true;
        double prev = 0.0;
        for (std::size_t k = 0; k < runs.size(); ++k) {
            double ratio = runs[k].cdelta_lbar_sup / std::pow(runs[k].delta, 0.25);
            if (k > 0 && ratio > prev * (1.0 + 1e-9)) mono = false;
            prev = ratio;
        }
        vs.push_back(check_band("cdelta_ratio_monotone", mono ? 1.0 : 0.0, 1.0, 1.0));
    }
    {
        double nmin = 1e300, nmax = 0.0;
        for (const RunSummary& r : runs) {
            nmin = std::min(nmin, r.order2_norm);
            nmax = std::max(nmax, r.order2_norm);
        }
        vs.push_back(check_band("order2_norm_variation",
                                nmin > 0.0 ? nmax / nmin : 1e300, 1.0, 4.0));
    }
    {
        double worst = 0.0;
        for (const RunSummary& r : runs) worst = std::max(worst, r.ks_worst);
        vs.push_back(check_band("pointwise_bound_worst", worst, 0.0, 10.0));
    }
    {
        double worst = 0.0;
        for (const RunSummary& r : runs) worst = std::max(worst, r.region3_sup);
        vs.push_back(check_band("region3_sup", worst, 0.0, 1e-13));
    }

    std::printf("study verdicts:\n");
    return write_verdicts(out_dir + "/verdicts.csv", vs);
}

int cmd_convergence(const RunConfig& c, const std::string& out_dir) {
    fs::create_directories(out_dir);
    DoubleNullGrid base =
        DoubleNullGrid::build(c.data.delta, c.ubar_max, c.h_fine, c.h_coarse,
                              c.u_cap);
    ConvergenceReport rep;
    if (c.coupling.empty()) {
        LinearOracle oracle(c.data);
        rep = convergence_study(c.data, c.coupling, base, c.convergence.levels, {},
                                &oracle);
    } else {
        rep = convergence_study(c.data, c.coupling, base, c.convergence.levels);
    }

    Csv csv;
    csv.header({"index", "h_fine", "error", "order"});
    for (std::size_t k = 0; k < rep.errors.size(); ++k) {
        csv.cell(static_cast<int>(k));
        csv.cell(rep.spacings[k]);
        csv.cell(rep.errors[k]);
        csv.cell(k > 0 && k - 1 < rep.orders.size() ? g17(rep.orders[k - 1])
                                                    : std::string(""));
        csv.end_row();
    }
    write_file(out_dir + "/convergence.csv", csv.str());

    std::printf("convergence (%s mode):", rep.mode.c_str());
    if (rep.exact) {
        std::printf(" errors at roundoff\n");
    } else {
        for (double o : rep.orders) std::printf(" %.3f", o);
        std::printf("\n");
    }
    return 0;
}

int cmd_compare(const RunConfig& c, const std::string& out_dir) {
    fs::create_directories(out_dir);
    std::vector<RunSummary> rows;
    std::vector<std::string> branches;

    {
        RunConfig cn = with_amplitude_preset(c, c.compare.amplitudes.front(), "q0");
        std::string dir = out_dir + "/null_a" + gshort(cn.data.amplitude);
        std::printf("compare: null branch, amplitude %g -> %s\n",
                    cn.data.amplitude, dir.c_str());
        rows.push_back(run_one(cn, dir));
        branches.push_back("null");
    }
    for (double a : c.compare.amplitudes) {
        RunConfig cb = with_amplitude_preset(c, a, "dt_squared");
        std::string dir = out_dir + "/nonnull_a" + gshort(a);
        std::printf("compare: non-null branch, amplitude %g -> %s\n", a,
                    dir.c_str());
        rows.push_back(run_one(cb, dir));
        branches.push_back("nonnull");
    }

    Csv csv;
    csv.header({"branch", "amplitude", "blew_up", "t_star", "top_ubar",
                "flux_tail_final", "region3_sup"});
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const RunSummary& r = rows[k];
        csv.cell(branches[k]);
        csv.cell(r.amplitude);
        csv.cell(r.blew_up ? 1 : 0);
        csv.cell(r.t_star);
        csv.cell(r.top_ubar);
        csv.cell(r.flux_tail_final);
        csv.cell(r.region3_sup);
        csv.end_row();
    }
    write_file(out_dir + "/compare_summary.csv", csv.str());

    const RunSummary& nul = rows.front();
    std::vector<Verdict> vs;
    vs.push_back(check_band("null_top_ubar", nul.blew_up ? 0.0 : nul.top_ubar,
                            c.ubar_max - 1.0, 1e300));
    vs.push_back(check_band("null_flux_tail_fraction", nul.flux_tail_final,
                            -1e300, 0.10));
    {
        bool all_blow = true;
        bool mono = true;
        double prev = 1e300;
        for (std::size_t k = 1; k < rows.size(); ++k) {
            if (!rows[k].blew_up || rows[k].t_star >= c.ubar_max) all_blow = false;
            if (rows[k].t_star > prev * (1.0 + 1e-9)) mono = false;
            prev = rows[k].t_star;
        }
        vs.push_back(check_band("nonnull_all_blow_up", all_blow ? 1.0 : 0.0, 1.0, 1.0));
        vs.push_back(check_band("nonnull_lifespan_monotone", mono ? 1.0 : 0.0, 1.0, 1.0));
    }
    std::printf("compare verdicts:\n");
    return write_verdicts(out_dir + "/compare_verdicts.csv", vs);
}

} // namespace nullpulse
