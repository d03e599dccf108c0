#include "nullpulse/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "nullpulse/errors.hpp"

namespace nullpulse {

namespace {

constexpr double PI = 3.14159265358979323846;

double sq(double x) { return x * x; }

// Largest ubar touched by a slice, for coverage checks against valid levels.
double slice_top_ubar(const ConeSlice& s) {
    switch (s.kind) {
    case SliceKind::ConeOut: return s.hi;
    case SliceKind::ConeIn: return s.value;
    case SliceKind::TimeSlice: return s.value - s.lo;
    }
    return s.hi;
}

void require_covered(const SolutionSheet& sheet, const ConeSlice& s,
                     const char* what) {
    if (s.empty()) return;
    double top = slice_top_ubar(s);
    if (!sheet.covers_ubar(top)) {
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "%s reaches ubar = %.6g beyond the computed levels", what,
                      top);
        throw partial_flux_error(buf);
    }
}

// L2 norm of a nodal array over a slice, weights already carrying 4 pi r^2.
// ubar_power inserts |ubar|^p into the squared integrand.
double l2_on_slice(const FieldArray& arr, const ConeSlice& slice,
                   double ubar_power = 0.0) {
    double s = 0.0;
    for (const SlicePoint& p : slice.pts) {
        double v = arr.interp(p.u, p.ubar);
        double w = ubar_power == 0.0 ? 1.0 : std::pow(std::fabs(p.ubar), ubar_power);
        s += p.weight * w * v * v;
    }
    return std::sqrt(s);
}

// Composite Gauss-5 quadrature of f over [a, b].
template <typename F>
double gauss5(F f, double a, double b, int panels) {
    static const double xg[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                 0.5384693101056831, 0.9061798459386640};
    static const double wg[5] = {0.2369268850561891, 0.4786286704993665,
                                 0.5688888888888889, 0.4786286704993665,
                                 0.2369268850561891};
    double h = (b - a) / panels;
    double s = 0.0;
    for (int k = 0; k < panels; ++k) {
        double c = a + (k + 0.5) * h;
        for (int q = 0; q < 5; ++q) s += wg[q] * f(c + 0.5 * h * xg[q]);
    }
    return s * 0.5 * h;
}

} // namespace

DecayFit fit_decay(const std::vector<std::pair<double, double>>& series,
                   double t_lo, double t_hi) {
    std::vector<double> xs, ys;
    int unusable = 0;
    for (const auto& tv : series) {
        if (tv.first < t_lo - 1e-12 || tv.first > t_hi + 1e-12) continue;
        if (!(tv.first > 0.0) || !(tv.second > 0.0) || !std::isfinite(tv.second)) {
            ++unusable;
            continue;
        }
        xs.push_back(std::log(tv.first));
        ys.push_back(std::log(tv.second));
    }
    if (unusable > 0) {
        throw fit_error(std::to_string(unusable) +
                        " non-positive or non-finite samples in the fit window");
    }
    if (xs.size() < 8) {
        throw fit_error("power-law fit needs at least 8 samples, window holds " +
                        std::to_string(xs.size()));
    }
    int n = static_cast<int>(xs.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int k = 0; k < n; ++k) {
        sx += xs[k];
        sy += ys[k];
        sxx += xs[k] * xs[k];
        sxy += xs[k] * ys[k];
    }
    double det = n * sxx - sx * sx;
    if (det <= 0.0) throw fit_error("degenerate abscissas in fit window");
    DecayFit out;
    out.exponent = (n * sxy - sx * sy) / det;
    double intercept = (sy - out.exponent * sx) / n;
    out.amplitude = std::exp(intercept);
    double r2 = 0.0;
    for (int k = 0; k < n; ++k) r2 += sq(ys[k] - (intercept + out.exponent * xs[k]));
    out.rms = std::sqrt(r2 / n);
    out.n = n;
    out.t_lo = t_lo;
    out.t_hi = t_hi;
    return out;
}

double cone_flux(const SolutionSheet& sheet, int field, const ConeSlice& slice,
                 FluxKind kind, double alpha) {
    require_covered(sheet, slice, "flux slice");
    Quantity q = kind == FluxKind::Incoming ? Quantity::LbarPhi : Quantity::LPhi;
    double s = 0.0;
    for (const SlicePoint& p : slice.pts) {
        double d = sheet.interp(q, field, p.u, p.ubar);
        double w = kind == FluxKind::WeightedOutgoing
                       ? std::pow(std::fabs(p.ubar), alpha)
                       : 1.0;
        s += p.weight * w * d * d;
    }
    return s;
}

SupSample sup_on_slice(const SolutionSheet& sheet, int field,
                       const ConeSlice& slice, Quantity q) {
    require_covered(sheet, slice, "sup slice");
    SupSample best;
    bool first = true;
    for (const SlicePoint& p : slice.pts) {
        double v = std::fabs(sheet.interp(q, field, p.u, p.ubar));
        if (first || v > best.value) {
            best.value = v;
            best.u = p.u;
            best.ubar = p.ubar;
            first = false;
        }
    }
    return best;
}

std::vector<std::pair<double, double>> sup_series(const SolutionSheet& sheet,
                                                  int field, Quantity q,
                                                  const std::vector<double>& ts,
                                                  double u_lo, double u_hi) {
    std::vector<std::pair<double, double>> out;
    out.reserve(ts.size());
    for (double t : ts) {
        ConeSlice s = extract_cone(sheet.grid(), SliceKind::TimeSlice, t, u_lo, u_hi);
        out.emplace_back(t, sup_on_slice(sheet, field, s, q).value);
    }
    return out;
}

double outgoing_cone_norm(const SolutionSheet& sheet, int field, int order,
                          double u, double ubar_hi, double alpha, double delta) {
    if (order < 0 || order > 3) throw input_error("commuted order must lie in [0, 3]");
    if (!(delta > 0.0)) throw input_error("pulse width must be positive");
    ConeSlice slice = extract_cone(sheet.grid(), SliceKind::ConeOut, u, -1e300, ubar_hi);
    require_covered(sheet, slice, "outgoing norm cone");
    double total = 0.0;
    for (const auto& w : words_of_length(order)) {
        FieldArray arr = apply_word(sheet, field, w);
        FieldArray la = l_of(arr);
        double norm = l2_on_slice(la, slice, alpha);
        total += std::pow(delta, word_translations(w) - 0.5) * norm;
    }
    return total;
}

double incoming_cone_norm(const SolutionSheet& sheet, int field, int order,
                          double ubar, double u_hi, double delta) {
    if (order < 0 || order > 3) throw input_error("commuted order must lie in [0, 3]");
    if (!(delta > 0.0)) throw input_error("pulse width must be positive");
    ConeSlice slice = extract_cone(sheet.grid(), SliceKind::ConeIn, ubar, -1e300, u_hi);
    require_covered(sheet, slice, "incoming norm cone");
    double total = 0.0;
    for (const auto& w : words_of_length(order)) {
        FieldArray arr = apply_word(sheet, field, w);
        FieldArray lba = lbar_of(arr);
        double norm = l2_on_slice(lba, slice);
        total += std::pow(delta, word_translations(w)) * norm;
    }
    return total;
}

double outgoing_cone_norm_total(const SolutionSheet& sheet, int field,
                                int max_order, double u, double ubar_hi,
                                double alpha, double delta) {
    double s = 0.0;
    for (int k = 0; k <= max_order; ++k)
        s += outgoing_cone_norm(sheet, field, k, u, ubar_hi, alpha, delta);
    return s;
}

double incoming_cone_norm_total(const SolutionSheet& sheet, int field,
                                int max_order, double ubar, double u_hi,
                                double delta) {
    double s = 0.0;
    for (int k = 0; k <= max_order; ++k)
        s += incoming_cone_norm(sheet, field, k, ubar, u_hi, delta);
    return s;
}

std::vector<CertificateRow> cdelta_certificate(const SolutionSheet& sheet,
                                               int field, double delta,
                                               double ubar_hi) {
    ConeSlice slice = extract_cone(sheet.grid(), SliceKind::ConeOut, delta, -1e300, ubar_hi);
    require_covered(sheet, slice, "certificate cone");
    std::vector<CertificateRow> rows;
    for (const auto& w : words_up_to(2)) {
        FieldArray arr = apply_word(sheet, field, w);
        FieldArray da[2] = {l_of(arr), lbar_of(arr)};
        const char* names[2] = {"L", "Lbar"};
        const double powers[2] = {1.5, 1.0};
        for (int d = 0; d < 2; ++d) {
            CertificateRow row;
            row.word = word_name(w);
            row.deriv = names[d];
            row.weight_power = powers[d];
            bool first = true;
            for (const SlicePoint& p : slice.pts) {
                double v = std::pow(std::fabs(p.ubar), powers[d]) *
                           std::fabs(da[d].interp(p.u, p.ubar));
                if (first || v > row.sup) {
                    row.sup = v;
                    row.at_ubar = p.ubar;
                    first = false;
                }
            }
            rows.push_back(row);
        }
    }
    return rows;
}

std::string to_string(Multiplier m) {
    switch (m) {
    case Multiplier::TimeTranslation: return "time_translation";
    case Multiplier::Incoming: return "incoming";
    case Multiplier::WeightedOutgoing: return "weighted_outgoing";
    }
    return "unknown";
}

IdentityBalance energy_identity_residual(const SolutionSheet& sheet,
                                         const ShortPulseData& data,
                                         const SystemCoupling& coupling,
                                         int field, Multiplier mult, double alpha,
                                         double u_a, double u_b, double ubar_b) {
    const DoubleNullGrid& g = sheet.grid();
    if (!(u_a < u_b)) throw input_error("identity domain needs u_a < u_b");
    if (!(u_b < 0.5))
        throw input_error("identity domain must stay left of the light-cone tip");
    if (!sheet.covers_ubar(ubar_b))
        throw partial_flux_error("identity top cone lies beyond the computed levels");

    int ia = g.find_ucol(u_a);
    int ib = g.find_ucol(u_b);
    int jb = g.find_level(ubar_b);
    auto aligned = [](double got, double want) {
        return std::fabs(got - want) <= 1e-9 * (1.0 + std::fabs(want));
    };
    if (!aligned(g.unode(ia), u_a) || !aligned(g.unode(ib), u_b))
        throw input_error("identity domain must start and end on grid columns");
    if (!aligned(g.ubar(jb), ubar_b))
        throw input_error("identity top cone must sit on a grid level");

    double xl_const = 0.0, xlb = 0.0;
    switch (mult) {
    case Multiplier::TimeTranslation: xl_const = 0.5; xlb = 0.5; break;
    case Multiplier::Incoming: xl_const = 0.0; xlb = 1.0; break;
    case Multiplier::WeightedOutgoing: xl_const = 1.0; xlb = 0.0; break;
    }
    bool weighted = mult == Multiplier::WeightedOutgoing;
    auto xl = [&](double ub) {
        return weighted ? std::pow(ub, alpha) : xl_const;
    };

    auto out_flux = [&](double u_cone) {
        ConeSlice s = extract_cone(g, SliceKind::ConeOut, u_cone, -1e300, ubar_b);
        double acc = 0.0;
        for (const SlicePoint& p : s.pts) {
            double d = sheet.interp(Quantity::LPhi, field, p.u, p.ubar);
            acc += p.weight * xl(p.ubar) * d * d;
        }
        return acc;
    };

    IdentityBalance bal;
    bal.flux_out_late = out_flux(u_b);
    bal.flux_out_early = out_flux(u_a);

    {
        ConeSlice s = extract_cone(g, SliceKind::ConeIn, ubar_b, u_a, u_b);
        double acc = 0.0;
        for (const SlicePoint& p : s.pts) {
            double d = sheet.interp(Quantity::LbarPhi, field, p.u, p.ubar);
            acc += p.weight * xlb * d * d;
        }
        bal.flux_in_top = acc;
    }

    // Data surface term.  The outgoing derivative vanishes identically on the
    // data slice, so only the incoming square survives, with closed form
    // Lbar phi = -2 phi0'(r) along r = 1 - 2u.
    {
        double r1 = 1.0 - 2.0 * u_b;
        double r2 = 1.0 - 2.0 * u_a;
        bal.surface =
            2.0 * xlb *
            gauss5([&](double r) { return sq(data.phi0_deriv(r, 1)) * 4.0 * PI * r * r; },
                   r1, r2, 256);
    }

    // Bulk integral with the cell-centered derivative formulas of the march,
    // triangles along the data surface and diamonds elsewhere.
    {
        int nf = sheet.n_fields();
        std::vector<double> lph(nf), lbph(nf), src(nf);
        double acc = 0.0;
        int mm = g.m_index();
        for (int j = 1; j <= jb; ++j) {
            double ub0 = g.ubar(j - 1), ub1 = g.ubar(j);
            double dub = ub1 - ub0;
            int i_start = std::max(g.i_lo(j) + 1, ia + 1);
            int i_end = std::min(g.i_hi(j), ib);
            for (int i = i_start; i <= i_end; ++i) {
                double u0 = g.unode(i - 1), u1 = g.unode(i);
                double du = u1 - u0;
                bool tri = j <= mm && g.on_surface(i - 1, j);
                double uc, ubc, area;
                if (tri) {
                    uc = (u0 + 2.0 * u1) / 3.0;
                    ubc = (ub0 + 2.0 * ub1) / 3.0;
                    area = 0.5 * du * dub;
                } else {
                    uc = 0.5 * (u0 + u1);
                    ubc = 0.5 * (ub0 + ub1);
                    area = du * dub;
                }
                double rc = ubc - uc;
                double lpt = 0.0, lbpt = 0.0;
                for (int f = 0; f < nf; ++f) {
                    double pn = sheet.psi(f, i, j);
                    double pw = sheet.psi(f, i, j - 1);
                    double pe = sheet.psi(f, i - 1, j);
                    double psic, lps, lbps;
                    if (tri) {
                        psic = (pn + pw + pe) / 3.0;
                        lps = (pn - pw) / dub;
                        lbps = (pn - pe) / du;
                    } else {
                        double ps = sheet.psi(f, i - 1, j - 1);
                        psic = 0.25 * (pn + pw + pe + ps);
                        lps = ((pe - ps) + (pn - pw)) / (2.0 * dub);
                        lbps = ((pw - ps) + (pn - pe)) / (2.0 * du);
                    }
                    lph[f] = lps / rc - psic / (rc * rc);
                    lbph[f] = lbps / rc + psic / (rc * rc);
                    if (f == field) {
                        lpt = lph[f];
                        lbpt = lbph[f];
                    }
                }
                coupling.source(lph.data(), lbph.data(), src.data());
                double kdens = 0.0;
                if (mult == Multiplier::Incoming) kdens = -lpt * lbpt / rc;
                if (weighted) kdens = std::pow(ubc, alpha) * lpt * lbpt / rc;
                double xphi = xl(ubc) * lpt + xlb * lbpt;
                acc += (kdens + src[field] * xphi) * 8.0 * PI * rc * rc * area;
            }
        }
        bal.bulk = acc;
    }

    bal.lhs = bal.flux_out_late + bal.flux_in_top;
    bal.rhs = bal.flux_out_early + bal.surface - bal.bulk;
    bal.residual = std::fabs(bal.lhs - bal.rhs) /
                   std::max({std::fabs(bal.lhs), std::fabs(bal.rhs), 1e-300});
    return bal;
}

std::vector<PointwiseBoundReport> klainerman_sobolev_check(
    const SolutionSheet& sheet, int field, const std::vector<double>& ts,
    double delta) {
    const DoubleNullGrid& g = sheet.grid();
    std::vector<ConeSlice> slices;
    slices.reserve(ts.size());
    for (double t : ts) {
        ConeSlice s = extract_cone(g, SliceKind::TimeSlice, t, delta, 1e300);
        require_covered(sheet, s, "pointwise bound slice");
        slices.push_back(std::move(s));
    }

    // One pass per word, accumulating its L2 norm on every slice, so at most a
    // few node-sized arrays are alive at a time.
    std::vector<double> norm_sum(ts.size(), 0.0);
    FieldArray base = phi_array(sheet, field);
    for (const auto& w : words_up_to(3)) {
        FieldArray arr = w.empty() ? base : apply_word(sheet, field, w);
        for (std::size_t k = 0; k < slices.size(); ++k)
            norm_sum[k] += l2_on_slice(arr, slices[k]);
    }

    std::vector<PointwiseBoundReport> out;
    for (std::size_t k = 0; k < ts.size(); ++k) {
        PointwiseBoundReport rep;
        rep.t = ts[k];
        rep.word_norm_sum = norm_sum[k];
        rep.boundary_value = std::fabs(base.interp(delta, ts[k] - delta));
        for (const SlicePoint& p : slices[k].pts) {
            if (p.r <= 0.0) continue;
            double lhs = std::fabs(base.interp(p.u, p.ubar));
            double rhs = std::pow(1.0 + p.u, -0.5) * rep.boundary_value +
                         std::pow(1.0 + p.ubar, -1.0) *
                             std::pow(1.0 + p.u, -0.5) * norm_sum[k];
            if (rhs <= 0.0) continue;
            double ratio = lhs / rhs;
            if (ratio > rep.worst_ratio) {
                rep.worst_ratio = ratio;
                rep.u = p.u;
                rep.ubar = p.ubar;
            }
            ++rep.n_points;
        }
        out.push_back(rep);
    }
    return out;
}

double initial_cone_energy(const ShortPulseData& data) {
    return 0.5 * initial_classical_energy(data, 0, data.delta / 16.0);
}

std::vector<FluxTailPoint> flux_tail(const SolutionSheet& sheet, int field,
                                     const ShortPulseData& data, int stride) {
    if (stride < 1) throw input_error("flux tail stride must be positive");
    const DoubleNullGrid& g = sheet.grid();
    double e0 = initial_cone_energy(data);
    int j0 = g.find_level(1.0 - data.delta);
    int jtop = sheet.valid_levels() - 1;
    std::vector<FluxTailPoint> out;
    for (int j = j0; j <= jtop; j += stride) {
        ConeSlice s = extract_cone(g, SliceKind::ConeIn, g.ubar(j));
        FluxTailPoint p;
        p.ubar = g.ubar(j);
        p.remaining = e0 - 0.5 * cone_flux(sheet, field, s, FluxKind::Incoming);
        out.push_back(p);
    }
    if (!out.empty() && out.back().ubar < g.ubar(jtop) - 1e-12) {
        ConeSlice s = extract_cone(g, SliceKind::ConeIn, g.ubar(jtop));
        FluxTailPoint p;
        p.ubar = g.ubar(jtop);
        p.remaining = e0 - 0.5 * cone_flux(sheet, field, s, FluxKind::Incoming);
        out.push_back(p);
    }
    return out;
}

StripBalance strip_energy_balance(const SolutionSheet& sheet, int field,
                                  const ShortPulseData& data, double t) {
    const DoubleNullGrid& g = sheet.grid();
    StripBalance b;
    b.initial_energy = initial_cone_energy(data);
    ConeSlice slice = extract_cone(g, SliceKind::TimeSlice, t, -1e300, data.delta);
    b.slice_energy = 0.25 * (cone_flux(sheet, field, slice, FluxKind::Outgoing) +
                             cone_flux(sheet, field, slice, FluxKind::Incoming));
    ConeSlice cone = extract_cone(g, SliceKind::ConeOut, data.delta, -1e300,
                                  t - data.delta);
    b.escaped_flux = 0.5 * cone_flux(sheet, field, cone, FluxKind::Outgoing);
    b.residual = std::fabs(b.slice_energy + b.escaped_flux - b.initial_energy) /
                 std::max(b.initial_energy, 1e-300);
    return b;
}

double vacuum_region_sup(const SolutionSheet& sheet) {
    const DoubleNullGrid& g = sheet.grid();
    double worst = 0.0;
    for (int j = 0; j < sheet.valid_levels(); ++j) {
        for (int i = g.i_lo(j); i <= g.i_hi(j) && g.unode(i) < 0.0; ++i) {
            for (int f = 0; f < sheet.n_fields(); ++f)
                worst = std::max(worst, std::fabs(sheet.psi(f, i, j)));
        }
    }
    return worst;
}

double analytic_field_identity_error() {
    struct TestFn {
        double (*f)(double, double);
        double (*ft)(double, double);
        double (*fr)(double, double);
    };
    static const TestFn fns[] = {
        {[](double t, double r) { return t * t * r; },
         [](double t, double r) { return 2.0 * t * r; },
         [](double t, double r) { (void)r; return t * t; }},
        {[](double t, double r) { (void)t; (void)r; return 1.0; },
         [](double t, double r) { (void)t; (void)r; return 0.0; },
         [](double t, double r) { (void)t; (void)r; return 0.0; }},
        {[](double t, double r) { return 1.0 / (1.0 + t * t + r * r); },
         [](double t, double r) { double d = 1.0 + t * t + r * r; return -2.0 * t / (d * d); },
         [](double t, double r) { double d = 1.0 + t * t + r * r; return -2.0 * r / (d * d); }},
    };
    static const double tvals[] = {0.3, 1.0, 2.5, 7.0};
    static const double rvals[] = {0.1, 0.9, 3.2, 6.0};
    double worst = 0.0;
    for (const TestFn& fn : fns) {
        for (double t : tvals) {
            for (double r : rvals) {
                if (std::fabs(t - r) < 0.05) continue;
                double lf = fn.ft(t, r) + fn.fr(t, r);
                double lbf = fn.ft(t, r) - fn.fr(t, r);
                double ub = 0.5 * (t + r), u = 0.5 * (t - r);
                double sf = ub * lf + u * lbf;
                double bf = ub * lf - u * lbf;
                double q = t * t - r * r;
                worst = std::max(worst,
                                 std::fabs(q * fn.ft(t, r) - (t * sf - r * bf)));
                worst = std::max(worst,
                                 std::fabs(q * fn.fr(t, r) - (t * bf - r * sf)));
            }
        }
    }
    return worst;
}

} // namespace nullpulse
