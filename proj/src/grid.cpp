// Master node set construction and slice extraction.  The mesh must satisfy
// several exactness constraints at once: the data surface has to pass through
// node pairs, the pulse bands need spacing at or below h_fine, grading may
// never jump spacings by more than 20 percent, and refinement by bisection
// has to reproduce every existing node bit for bit.

#include "nullpulse/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "nullpulse/errors.hpp"

namespace nullpulse {

namespace {

const double RATIO_CAP = 1.2;

/// Step sizes covering length L: geometric ramp away from h0 capped at
/// h_cap, uniformly rescaled to land on L exactly.  The rescale keeps
/// interior ratios untouched, so only the entry seam sees it, and the search
/// keeps that seam ratio under the cap.
std::vector<double> graded_steps(double L, double h0, double h_cap) {
    if (!(L > 0.0))
        throw grid_error("graded segment with non-positive length");
    if (!(h0 > 0.0) || !(h_cap > 0.0))
        throw grid_error("graded segment with non-positive spacings");

    for (double rho = 1.15; rho >= 1.0074; rho -= 0.005) {
        std::vector<double> steps;
        double s = 0.0, h = h0;
        while (s < 1.25 * L) {
            h = std::min(h * rho, h_cap);
            steps.push_back(h);
            s += h;
            if (steps.size() > 50000000u)
                throw grid_error("graded segment needs unreasonably many steps");
        }

        double partial = 0.0;
        double best_lambda = 0.0;
        std::size_t best_n = 0;
        for (std::size_t n = 1; n <= steps.size(); ++n) {
            partial += steps[n - 1];
            if (partial < 0.94 * L) continue;
            if (partial > 1.07 * L) break;
            const double lambda = L / partial;
            if (lambda < 0.962 || lambda > 1.0415) continue;
            if (lambda * rho > 1.1995) continue;
            if (best_n == 0 ||
                std::abs(std::log(lambda)) < std::abs(std::log(best_lambda))) {
                best_lambda = lambda;
                best_n = n;
            }
        }
        if (best_n > 0) {
            std::vector<double> out(steps.begin(),
                                    steps.begin() + static_cast<long>(best_n));
            for (double& v : out) v *= best_lambda;
            return out;
        }
    }
    throw grid_error("cannot grade a segment of length " + std::to_string(L) +
                     " between spacings " + std::to_string(h0) + " and " +
                     std::to_string(h_cap));
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

} // namespace

double ConeSlice::total_weight() const {
    double s = 0.0;
    for (const SlicePoint& p : pts) s += p.weight;
    return s;
}

DoubleNullGrid DoubleNullGrid::build(double delta, double ubar_max, double h_fine,
                                     double h_coarse, double u_cap) {
    if (!(delta > 0.0) || !(delta <= 0.25))
        throw grid_error("delta must lie in (0, 0.25]");
    if (!(h_fine > 0.0) || h_fine > delta / 4.0)
        throw grid_error("h_fine must be positive and at most delta/4");
    if (!(h_coarse >= h_fine) || h_coarse > 0.2)
        throw grid_error("h_coarse must lie in [h_fine, 0.2]");
    if (!(ubar_max >= 1.0 + 4.0 * delta + 12.0 * h_coarse))
        throw grid_error("ubar_max leaves no room for the far tail; need at "
                         "least 1 + 4 delta + 12 h_coarse");
    if (u_cap < 0.0) u_cap = 0.5 * ubar_max + 1.0;
    if (!(u_cap >= 1.0) || u_cap > ubar_max)
        throw grid_error("u_cap must lie in [1, ubar_max]");

    const int k = static_cast<int>(std::ceil(delta / h_fine - 1e-12));
    const double ha = delta / k;

    DoubleNullGrid g;
    std::vector<double>& x = g.master_;
    x.push_back(-delta);

    const double lb_half = 0.5 - 5.0 * delta;
    if (lb_half >= 12.0 * h_coarse) {
        // Uniform fine block [-delta, 5 delta], then graded half toward 1/2.
        for (int j = 1; j <= 6 * k; ++j) x.push_back(-delta + j * ha);
        x[static_cast<std::size_t>(k)] = 0.0;
        x[static_cast<std::size_t>(2 * k)] = delta;
        x[static_cast<std::size_t>(6 * k)] = 5.0 * delta;
        for (double h : graded_steps(lb_half, ha, h_coarse))
            x.push_back(x.back() + h);
    } else {
        // The pulse bands nearly meet at 1/2; mesh the whole half window at
        // fine spacing.
        for (int j = 1; j <= 2 * k; ++j) x.push_back(-delta + j * ha);
        x[static_cast<std::size_t>(k)] = 0.0;
        x[static_cast<std::size_t>(2 * k)] = delta;
        const double l2 = 0.5 - delta;
        const int n2 = static_cast<int>(std::ceil(l2 / ha - 1e-12));
        for (int j = 1; j <= n2; ++j) x.push_back(delta + j * (l2 / n2));
    }
    g.m_ = static_cast<int>(x.size()) - 1;
    x[static_cast<std::size_t>(g.m_)] = 0.5;

    // Mirror through x -> 1 - x; index m + j pairs with m - j across the
    // data surface.
    for (int j = 1; j <= g.m_; ++j)
        x.push_back(1.0 - x[static_cast<std::size_t>(g.m_ - j)]);

    // Fine extension past the light cone window, then the graded far tail.
    const int n3 = static_cast<int>(std::ceil(3.0 * delta / ha - 1e-12));
    const double h3 = 3.0 * delta / n3;
    const double top = 1.0 + delta;
    for (int j = 1; j <= n3; ++j) x.push_back(top + j * h3);
    x.back() = 1.0 + 4.0 * delta;
    for (double h : graded_steps(ubar_max - (1.0 + 4.0 * delta), h3, h_coarse))
        x.push_back(x.back() + h);
    x.back() = ubar_max;

    g.finalize(delta, ubar_max, h_fine, h_coarse, u_cap);
    return g;
}

void DoubleNullGrid::finalize(double delta, double ubar_max, double h_fine,
                              double h_coarse, double u_cap) {
    delta_ = delta;
    ubar_max_ = ubar_max;
    h_fine_ = h_fine;
    h_coarse_ = h_coarse;
    u_cap_ = u_cap;

    const int n = static_cast<int>(master_.size());
    if (n < m_ + 2) throw grid_error("master node set too small");

    double prev_h = 0.0;
    for (int i = 1; i < n; ++i) {
        const double h = master_[static_cast<std::size_t>(i)] -
                         master_[static_cast<std::size_t>(i - 1)];
        if (!(h > 0.0)) throw grid_error("master nodes not strictly increasing");
        if (prev_h > 0.0) {
            const double ratio = h > prev_h ? h / prev_h : prev_h / h;
            if (ratio > RATIO_CAP * 1.005)
                throw grid_error("adjacent spacing ratio exceeds the cap near x=" +
                                 std::to_string(master_[static_cast<std::size_t>(i)]));
        }
        if (h > h_coarse * 1.1)
            throw grid_error("spacing exceeds the coarse target near x=" +
                             std::to_string(master_[static_cast<std::size_t>(i)]));
        const double a = master_[static_cast<std::size_t>(i - 1)];
        const double b = master_[static_cast<std::size_t>(i)];
        const bool in_pulse_band = a >= -delta - 1e-14 && b <= delta + 1e-14;
        const bool in_cone_band =
            a >= 1.0 - 5.0 * delta - 1e-14 && b <= 1.0 + 4.0 * delta + 1e-14;
        if ((in_pulse_band || in_cone_band) && h > h_fine * 1.0001)
            throw grid_error("fine band spacing exceeds h_fine near x=" +
                             std::to_string(b));
        prev_h = h;
    }

    iu_max_ = 0;
    for (int i = 0; i < n; ++i)
        if (master_[static_cast<std::size_t>(i)] <= u_cap_ * (1.0 + 1e-14) + 1e-14)
            iu_max_ = i;
    if (iu_max_ < m_) throw grid_error("u_cap truncates the data surface");

    const int nl = levels();
    offsets_.assign(static_cast<std::size_t>(nl), 0);
    std::int64_t acc = 0;
    for (int j = 0; j < nl; ++j) {
        offsets_[static_cast<std::size_t>(j)] = acc;
        acc += row_length(j);
    }
    total_nodes_ = acc;
}

int DoubleNullGrid::find_level(double ub) const {
    const auto b = master_.begin() + m_;
    auto it = std::upper_bound(b, master_.end(), ub);
    int j = static_cast<int>(it - b) - 1;
    if (j < 0) j = 0;
    if (j > levels() - 1) j = levels() - 1;
    return j;
}

int DoubleNullGrid::find_ucol(double u) const {
    auto it = std::upper_bound(master_.begin(),
                               master_.begin() + (iu_max_ + 1), u);
    int i = static_cast<int>(it - master_.begin()) - 1;
    if (i < 0) i = 0;
    if (i > iu_max_) i = iu_max_;
    return i;
}

DoubleNullGrid DoubleNullGrid::bisect() const {
    DoubleNullGrid g;
    g.master_.reserve(master_.size() * 2 - 1);
    for (std::size_t i = 0; i + 1 < master_.size(); ++i) {
        g.master_.push_back(master_[i]);
        g.master_.push_back(0.5 * (master_[i] + master_[i + 1]));
    }
    g.master_.push_back(master_.back());
    g.m_ = 2 * m_;
    g.finalize(delta_, ubar_max_, 0.5 * h_fine_, 0.5 * h_coarse_, u_cap_);
    return g;
}

std::uint64_t DoubleNullGrid::content_hash() const {
    std::uint64_t h = 1469598103934665603ull;
    h = fnv1a(h, &delta_, sizeof(delta_));
    h = fnv1a(h, &ubar_max_, sizeof(ubar_max_));
    h = fnv1a(h, &u_cap_, sizeof(u_cap_));
    h = fnv1a(h, &m_, sizeof(m_));
    h = fnv1a(h, &iu_max_, sizeof(iu_max_));
    if (!master_.empty())
        h = fnv1a(h, master_.data(), master_.size() * sizeof(double));
    return h;
}

ConeSlice extract_cone(const DoubleNullGrid& grid, SliceKind kind, double value,
                       double param_lo, double param_hi) {
    ConeSlice slice;
    slice.kind = kind;
    slice.value = value;

    double lo = param_lo, hi = param_hi;
    switch (kind) {
        case SliceKind::ConeOut:
            lo = std::max(lo, std::max(1.0 - value, value));
            hi = std::min(hi, grid.ubar_max());
            break;
        case SliceKind::ConeIn:
            lo = std::max(lo, std::max(-grid.delta(), 1.0 - value));
            hi = std::min(hi, std::min(value, grid.unode(grid.iu_max())));
            break;
        case SliceKind::TimeSlice:
            lo = std::max(lo, std::max(-grid.delta(), value - grid.ubar_max()));
            hi = std::min(hi, std::min(0.5 * value, grid.unode(grid.iu_max())));
            break;
    }
    slice.lo = lo;
    slice.hi = hi;
    if (!(hi > lo)) return slice;

    // Running parameter values: exact endpoints plus every master node
    // strictly between them.
    std::vector<double> params;
    params.push_back(lo);
    const int first =
        kind == SliceKind::ConeOut ? grid.m_index() : 0;
    const int last =
        kind == SliceKind::ConeOut ? grid.master_size() - 1 : grid.iu_max();
    for (int idx = first; idx <= last; ++idx) {
        const double v = grid.master(idx);
        if (v > lo + 1e-14 * (1.0 + std::abs(lo)) &&
            v < hi - 1e-14 * (1.0 + std::abs(hi)))
            params.push_back(v);
    }
    params.push_back(hi);

    const std::size_t np = params.size();
    slice.pts.resize(np);
    for (std::size_t a = 0; a < np; ++a) {
        SlicePoint& p = slice.pts[a];
        const double s = params[a];
        switch (kind) {
            case SliceKind::ConeOut:
                p.u = value;
                p.ubar = s;
                break;
            case SliceKind::ConeIn:
                p.u = s;
                p.ubar = value;
                break;
            case SliceKind::TimeSlice:
                p.u = s;
                p.ubar = value - s;
                break;
        }
        p.r = p.ubar - p.u;
        if (p.r < 0.0 && p.r > -1e-12) p.r = 0.0;
        const double left = a == 0 ? 0.0 : 0.5 * (params[a] - params[a - 1]);
        const double right = a + 1 == np ? 0.0 : 0.5 * (params[a + 1] - params[a]);
        double w = (left + right) * 4.0 * M_PI * p.r * p.r;
        // On a time slice the parameter is u while the measure is dr = 2 du.
        if (kind == SliceKind::TimeSlice) w *= 2.0;
        p.weight = w;
    }
    return slice;
}

double interp_on_levels(const DoubleNullGrid& g, int valid_levels, double u,
                        double ub, const std::function<double(int, int)>& value) {
    if (valid_levels <= 0) throw input_error("interpolation on an empty sheet");
    const int jl = valid_levels - 1;
    const double top = g.ubar(jl);
    const double tol = 1e-12;
    if (ub > top + tol * (1.0 + std::abs(top))) {
        if (ub <= g.ubar_max() + tol * (1.0 + g.ubar_max()))
            throw partial_flux_error("evaluation above the computed levels");
        throw input_error("evaluation outside the grid in ubar");
    }
    if (ub < g.ubar(0) - tol) throw input_error("evaluation below the initial level");
    ub = std::min(std::max(ub, g.ubar(0)), top);

    const double u_hi = g.unode(g.iu_max());
    if (u < g.master(0) - tol || u > u_hi + tol)
        throw input_error("evaluation outside the grid in u");
    if (u > ub + tol) throw input_error("evaluation beyond the axis");
    u = std::min(std::max(u, g.master(0)), std::min(ub, u_hi));

    int j0 = g.find_level(ub);
    if (j0 > jl) j0 = jl;
    double wv = 0.0;
    if (j0 < jl) {
        wv = (ub - g.ubar(j0)) / (g.ubar(j0 + 1) - g.ubar(j0));
        wv = std::min(std::max(wv, 0.0), 1.0);
    }

    const int i0 = g.find_ucol(u);
    double wu = 0.0;
    if (i0 < g.iu_max()) {
        wu = (u - g.unode(i0)) / (g.unode(i0 + 1) - g.unode(i0));
        wu = std::min(std::max(wu, 0.0), 1.0);
    }

    auto level_value = [&](int jj, bool& ok) -> double {
        const int il = g.i_lo(jj), ih = g.i_hi(jj);
        double acc = 0.0, wsum = 0.0;
        const double cw[2] = {1.0 - wu, wu};
        for (int c = 0; c < 2; ++c) {
            const int ii = i0 + c;
            if (cw[c] == 0.0) continue;
            if (ii < il || ii > ih) continue;
            acc += cw[c] * value(ii, jj);
            wsum += cw[c];
        }
        if (wsum > 0.0) {
            ok = true;
            return acc / wsum;
        }
        // The whole u-interval misses this level's row.  Accept only points
        // within one cell of the row end, the sliver cut off by the data
        // surface rim, and use the nearest row end there.
        const int ii = std::min(std::max(i0, il), ih);
        if (ii < il || ii > ih) {
            ok = false;
            return 0.0;
        }
        const int inb = (ii == il) ? std::min(il + 1, ih) : std::max(ih - 1, il);
        const double span = std::abs(g.unode(inb) - g.unode(ii));
        if (std::abs(u - g.unode(ii)) > span + tol) {
            ok = false;
            return 0.0;
        }
        ok = true;
        return value(ii, jj);
    };

    bool ok0 = false, ok1 = false;
    const double v0 = level_value(j0, ok0);
    double v1 = 0.0;
    if (wv > 0.0) v1 = level_value(j0 + 1, ok1);

    if (wv == 0.0) {
        if (!ok0) throw input_error("evaluation point has no covering cell");
        return v0;
    }
    if (ok0 && ok1) return (1.0 - wv) * v0 + wv * v1;
    if (ok1) return v1;
    if (ok0) return v0;
    throw input_error("evaluation point has no covering cell");
}

} // namespace nullpulse
