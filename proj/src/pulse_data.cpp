// Short pulse Cauchy data on the unit sphere: profile algebra, classical
// energies of the derivative pairs, and the mixed-derivative tables that feed
// the weighted initial norms.

#include "nullpulse/pulse_data.hpp"

#include <algorithm>
#include <cmath>

#include "nullpulse/errors.hpp"

namespace nullpulse {

namespace {

// Gauss-Legendre 7 point rule on [-1, 1].
const double GAUSS7_X[7] = {
    0.0,
    -0.4058451513773972, 0.4058451513773972,
    -0.7415311855993945, 0.7415311855993945,
    -0.9491079123427585, 0.9491079123427585};
const double GAUSS7_W[7] = {
    0.4179591836734694,
    0.3818300505051189, 0.3818300505051189,
    0.2797053914892766, 0.2797053914892766,
    0.1294849661688697, 0.1294849661688697};

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int j = 1; j <= k; ++j) r = r * (n - k + j) / j;
    return r;
}

/// Falling factorial p (p-1) ... (p-j+1); zero once the exponent is exhausted.
double falling(int p, int j) {
    if (j > p) return 0.0;
    double r = 1.0;
    for (int i = 0; i < j; ++i) r *= (p - i);
    return r;
}

/// Composite Gauss quadrature of f over [a, b] with at least n_panels panels.
template <typename F>
double integrate(F&& f, double a, double b, int n_panels) {
    double sum = 0.0;
    const double h = (b - a) / n_panels;
    for (int p = 0; p < n_panels; ++p) {
        const double c = a + (p + 0.5) * h;
        for (int g = 0; g < 7; ++g)
            sum += GAUSS7_W[g] * f(c + 0.5 * h * GAUSS7_X[g]);
    }
    return sum * 0.5 * h;
}

} // namespace

PulseProfile::PulseProfile(const std::string& kind, const std::vector<double>& params)
    : kind_(kind) {
    if (kind_ != "polynomial_bump")
        throw config_error("unknown profile kind '" + kind_ + "'");
    if (params.size() != 2)
        throw config_error("polynomial_bump takes exactly two exponent parameters");
    const double pd = params[0], qd = params[1];
    if (!(pd == std::floor(pd)) || !(qd == std::floor(qd)))
        throw config_error("profile exponents must be integers");
    p_ = static_cast<int>(pd);
    q_ = static_cast<int>(qd);
    if (p_ < 8 || q_ < 8 || p_ > 40 || q_ > 40)
        throw config_error("profile exponents must lie in [8, 40] so the bump "
                           "stays smooth through every derivative taken here");
    const double s_star = static_cast<double>(p_) / (p_ + q_);
    cnorm_ = 1.0 / (std::pow(s_star, p_) * std::pow(1.0 - s_star, q_));
}

double PulseProfile::derivative(double s, int k) const {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    double sum = 0.0;
    for (int j = 0; j <= k; ++j) {
        const double fp = falling(p_, j);
        const double fq = falling(q_, k - j);
        if (fp == 0.0 || fq == 0.0) continue;
        const double sign = ((k - j) % 2 == 0) ? 1.0 : -1.0;
        sum += binom(k, j) * fp * std::pow(s, p_ - j) * sign * fq *
               std::pow(1.0 - s, q_ - (k - j));
    }
    return cnorm_ * sum;
}

double PulseProfile::antiderivative(double s) const {
    // Total mass via an exact product for Beta(p+1, q+1).
    double beta = 1.0;
    for (int j = 1; j <= q_; ++j) beta *= static_cast<double>(j) / (p_ + j);
    beta /= (p_ + q_ + 1);
    const double full = cnorm_ * beta;

    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return full;
    if (s <= 0.5) {
        // Expand (1-s)^q; the small powers of s keep the alternating sum tame.
        double sum = 0.0;
        for (int j = 0; j <= q_; ++j) {
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            sum += sign * binom(q_, j) * std::pow(s, p_ + j + 1) / (p_ + j + 1);
        }
        return cnorm_ * sum;
    }
    // Mirror expansion from the right endpoint for the same reason.
    double sum = 0.0;
    const double sig = 1.0 - s;
    for (int j = 0; j <= p_; ++j) {
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        sum += sign * binom(p_, j) * std::pow(sig, q_ + j + 1) / (q_ + j + 1);
    }
    return full - cnorm_ * sum;
}

double ShortPulseData::phi0_deriv(double r, int k) const {
    const double s = (1.0 - r) / (2.0 * delta);
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double chain = std::pow(-0.5 / delta, k);
    return amplitude * std::sqrt(delta) * chain * profile.derivative(s, k);
}

ShortPulseData ShortPulseData::make(double delta, double amplitude,
                                    PulseProfile profile, int n_fields) {
    if (!(delta > 0.0) || !(delta <= 0.25))
        throw config_error("delta must lie in (0, 0.25]; the data shell must "
                           "stay inside the unit ball with room to spare");
    if (!std::isfinite(amplitude) || amplitude <= 0.0)
        throw config_error("amplitude must be finite and positive");
    if (n_fields < 1)
        throw config_error("n_fields must be at least 1");
    ShortPulseData d;
    d.delta = delta;
    d.amplitude = amplitude;
    d.profile = profile;
    d.n_fields = n_fields;
    return d;
}

double initial_classical_energy(const ShortPulseData& data, int k, double step) {
    if (k < 0 || k > 2)
        throw config_error("classical energy implemented for k <= 2");
    if (!(step > 0.0) || step > data.delta / 16.0 * (1.0 + 1e-12))
        throw resolution_error("quadrature step must be at most delta/16 to "
                               "resolve the data shell");
    const double a = data.r_inner(), b = 1.0;
    const int n_panels = std::max(1, static_cast<int>(std::ceil((b - a) / step)));

    auto density = [&](double r) -> double {
        double g = 0.0;
        switch (k) {
            case 0: {
                const double d1 = data.phi0_deriv(r, 1);
                const double v0 = data.phi1(r);
                g = d1 * d1 + v0 * v0;
                break;
            }
            case 1: {
                const double d1 = data.phi0_deriv(r, 1);
                const double d2 = data.phi0_deriv(r, 2);
                const double v1 = data.phi1_deriv(r, 1);
                g = d2 * d2 + 2.0 * (d1 / r) * (d1 / r) + v1 * v1;
                break;
            }
            case 2: {
                const double d1 = data.phi0_deriv(r, 1);
                const double d2 = data.phi0_deriv(r, 2);
                const double d3 = data.phi0_deriv(r, 3);
                const double v1 = data.phi1_deriv(r, 1);
                const double v2 = data.phi1_deriv(r, 2);
                const double h2 = (d2 - d1 / r) / r;
                g = d3 * d3 + 6.0 * h2 * h2 + v2 * v2 + 2.0 * (v1 / r) * (v1 / r);
                break;
            }
        }
        return 4.0 * M_PI * r * r * g;
    };
    return integrate(density, a, b, n_panels);
}

TaylorTable::TaylorTable(const ShortPulseData& data, const SystemCoupling& coupling,
                         double r) {
    const int nf = data.n_fields;
    tables_.assign(static_cast<std::size_t>(nf), Table{});
    for (Table& t : tables_) { t.t = 1.0; t.r = r; }

    // Reduced source terms regrouped as A00 phi_t psi_t + mu phi_r psi_r.
    struct TrTerm { double a00, mu; int j, k; };
    std::vector<std::vector<TrTerm>> terms(static_cast<std::size_t>(nf));
    for (int f = 0; f < nf && f < coupling.n_fields(); ++f)
        for (const RadialNullFrameForm& q : coupling.reduced_terms(f))
            terms[static_cast<std::size_t>(f)].push_back(
                {2.0 * (q.c_ll + q.c_lb), 2.0 * (q.c_ll - q.c_lb), q.field_j, q.field_k});

    for (int total = 0; total <= MaxTotal; ++total) {
        for (int a = 0; a <= total; ++a) {
            const int b = total - a;
            for (int f = 0; f < nf; ++f) {
                Table& tbl = tables_[static_cast<std::size_t>(f)];
                if (a == 0) {
                    tbl.at(0, b) = data.phi0_deriv(r, b);
                } else if (a == 1) {
                    tbl.at(1, b) = data.phi1_deriv(r, b);
                } else {
                    // d_t^a d_r^b phi from the wave equation solved for the
                    // second time derivative,
                    //   phi_tt = phi_rr + (2/r) phi_r - Q.
                    double val = tbl.at(a - 2, b + 2);
                    double fac = 1.0 / r;
                    for (int c = 0; c <= b; ++c) {
                        // d_r^c (1/r) = (-1)^c c! r^{-c-1}
                        val += 2.0 * binom(b, c) * fac * tbl.at(a - 2, b - c + 1);
                        fac *= -(c + 1) / r;
                    }
                    double qv = 0.0;
                    for (const TrTerm& tm : terms[static_cast<std::size_t>(f)]) {
                        const Table& tj = tables_[static_cast<std::size_t>(tm.j)];
                        const Table& tk = tables_[static_cast<std::size_t>(tm.k)];
                        for (int i = 0; i <= a - 2; ++i)
                            for (int j = 0; j <= b; ++j) {
                                const double c2 = binom(a - 2, i) * binom(b, j);
                                if (tm.a00 != 0.0)
                                    qv += c2 * tm.a00 * tj.at(i + 1, j) *
                                          tk.at(a - 1 - i, b - j);
                                if (tm.mu != 0.0)
                                    qv += c2 * tm.mu * tj.at(i, j + 1) *
                                          tk.at(a - 2 - i, b - j + 1);
                            }
                    }
                    tbl.at(a, b) = val - qv;
                }
            }
        }
    }
}

TaylorTable::Table apply_vf(const TaylorTable::Table& in, VfName z) {
    TaylorTable::Table out;
    out.order = in.order - 1;
    out.t = in.t;
    out.r = in.r;
    for (int a = 0; a + 0 <= out.order; ++a)
        for (int b = 0; a + b <= out.order; ++b) {
            double v = 0.0;
            switch (z) {
                case VfName::T:
                    v = in.at(a + 1, b);
                    break;
                case VfName::S:
                    // d^a_t d^b_r (t g_t + r g_r) by Leibniz on the linear weights.
                    v = in.t * in.at(a + 1, b) + a * in.at(a, b) +
                        in.r * in.at(a, b + 1) + b * in.at(a, b);
                    break;
                case VfName::B:
                    v = in.r * in.at(a + 1, b) + in.t * in.at(a, b + 1);
                    if (b > 0) v += b * in.at(a + 1, b - 1);
                    if (a > 0) v += a * in.at(a - 1, b + 1);
                    break;
            }
            out.at(a, b) = v;
        }
    return out;
}

double l_value(const TaylorTable::Table& tbl) { return tbl.at(1, 0) + tbl.at(0, 1); }
double lbar_value(const TaylorTable::Table& tbl) { return tbl.at(1, 0) - tbl.at(0, 1); }

InitialNormBreakdown initial_weighted_norm_detail(const ShortPulseData& data,
                                                  const SystemCoupling& coupling,
                                                  int n, double alpha) {
    if (n < 0 || n > 3)
        throw config_error("weighted initial norm implemented for word length <= 3");
    (void)alpha;

    // Enumerate words once so every quadrature point accumulates into the
    // same row layout.  Letters are listed outermost first.
    std::vector<std::string> words{""};
    for (std::size_t head = 0; head < words.size(); ++head) {
        const std::string w = words[head];
        if (static_cast<int>(w.size()) < n)
            for (char z : {'T', 'S', 'B'}) words.push_back(w + z);
    }

    InitialNormBreakdown out;
    out.rows.resize(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
        out.rows[i].word = words[i];
        out.rows[i].n_bad = static_cast<int>(
            std::count(words[i].begin(), words[i].end(), 'T'));
    }

    const double a = data.r_inner(), b = 1.0;
    const int n_panels = 64;
    const double h = (b - a) / n_panels;
    for (int pan = 0; pan < n_panels; ++pan) {
        const double c = a + (pan + 0.5) * h;
        for (int g = 0; g < 7; ++g) {
            const double r = c + 0.5 * h * GAUSS7_X[g];
            const double wq = 0.5 * h * GAUSS7_W[g] * 4.0 * M_PI * r * r;
            const TaylorTable base(data, coupling, r);
            for (std::size_t wi = 0; wi < words.size(); ++wi) {
                for (int f = 0; f < data.n_fields; ++f) {
                    TaylorTable::Table t = base.field(f);
                    // Apply innermost (rightmost) letters first.
                    const std::string& w = words[wi];
                    for (auto it = w.rbegin(); it != w.rend(); ++it)
                        t = apply_vf(t, static_cast<VfName>(*it));
                    const double lv = l_value(t);
                    const double lb = lbar_value(t);
                    out.rows[wi].l2_l += wq * lv * lv;
                    out.rows[wi].l2_lbar += wq * lb * lb;
                }
            }
        }
    }

    for (InitialNormRow& row : out.rows) {
        row.l2_l = std::sqrt(row.l2_l);
        row.l2_lbar = std::sqrt(row.l2_lbar);
        out.total += std::pow(data.delta, row.n_bad) * row.l2_lbar +
                     std::pow(data.delta, row.n_bad - 1) * row.l2_l;
    }
    return out;
}

double initial_weighted_norm(const ShortPulseData& data, const SystemCoupling& coupling,
                             int n, double alpha) {
    return initial_weighted_norm_detail(data, coupling, n, alpha).total;
}

} // namespace nullpulse
