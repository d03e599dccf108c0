#include "nullpulse/vectorfields.hpp"

#include <algorithm>
#include <cmath>

#include "nullpulse/errors.hpp"
#include "nullpulse/stencils.hpp"

namespace nullpulse {

FieldArray make_array(const DoubleNullGrid& grid, int valid_levels) {
    FieldArray a;
    a.grid = &grid;
    a.valid_levels = valid_levels;
    a.v.assign(static_cast<std::size_t>(grid.node_count()), 0.0);
    return a;
}

FieldArray phi_array(const SolutionSheet& sheet, int field) {
    const DoubleNullGrid& g = sheet.grid();
    FieldArray a = make_array(g, sheet.valid_levels());
    for (int j = 0; j < a.valid_levels; ++j)
        for (int i = g.i_lo(j); i <= g.i_hi(j); ++i)
            a.at(i, j) = sheet.phi(field, i, j);
    return a;
}

FieldArray l_of(const FieldArray& a) {
    const DoubleNullGrid& g = *a.grid;
    FieldArray out = make_array(g, a.valid_levels);
    const int jl = a.valid_levels - 1;
    for (int j = 0; j <= jl; ++j) {
        for (int i = g.i_lo(j); i <= g.i_hi(j); ++i) {
            const int jf = g.j_first(i);
            const int span = jl - jf + 1;
            double d = 0.0;
            if (span == 2) {
                d = (a.at(i, jf + 1) - a.at(i, jf)) / (g.ubar(jf + 1) - g.ubar(jf));
            } else if (span >= 3) {
                int ja = j - 1;
                if (j == jf) ja = jf;
                if (j == jl) ja = jl - 2;
                d = quad_deriv(g.ubar(ja), a.at(i, ja), g.ubar(ja + 1), a.at(i, ja + 1),
                               g.ubar(ja + 2), a.at(i, ja + 2), g.ubar(j));
            }
            out.at(i, j) = d;
        }
    }
    return out;
}

FieldArray lbar_of(const FieldArray& a) {
    const DoubleNullGrid& g = *a.grid;
    FieldArray out = make_array(g, a.valid_levels);
    for (int j = 0; j < a.valid_levels; ++j) {
        const int il = g.i_lo(j), ih = g.i_hi(j);
        const int span = ih - il + 1;
        for (int i = il; i <= ih; ++i) {
            double d = 0.0;
            if (span == 2) {
                d = (a.at(il + 1, j) - a.at(il, j)) / (g.unode(il + 1) - g.unode(il));
            } else if (span >= 3) {
                int ia = i - 1;
                if (i == il) ia = il;
                if (i == ih) ia = ih - 2;
                d = quad_deriv(g.unode(ia), a.at(ia, j), g.unode(ia + 1), a.at(ia + 1, j),
                               g.unode(ia + 2), a.at(ia + 2, j), g.unode(i));
            }
            out.at(i, j) = d;
        }
    }
    return out;
}

namespace {

// Zg = cl * Lg + cb * Lbarg with the per-node coefficients of field z.
FieldArray fuse(const FieldArray& lg, const FieldArray& lbg, VfName z) {
    const DoubleNullGrid& g = *lg.grid;
    FieldArray out = make_array(g, lg.valid_levels);
    for (int j = 0; j < out.valid_levels; ++j) {
        const double ub = g.ubar(j);
        for (int i = g.i_lo(j); i <= g.i_hi(j); ++i) {
            const double u = g.unode(i);
            double cl = 0.0, cb = 0.0;
            switch (z) {
                case VfName::T: cl = 0.5; cb = 0.5; break;
                case VfName::S: cl = ub; cb = u; break;
                case VfName::B: cl = ub; cb = -u; break;
            }
            out.at(i, j) = cl * lg.at(i, j) + cb * lbg.at(i, j);
        }
    }
    return out;
}

} // namespace

FieldArray apply_field(const FieldArray& a, VfName z) {
    return fuse(l_of(a), lbar_of(a), z);
}

FieldArray apply_word(const SolutionSheet& sheet, int field,
                      const std::vector<VfName>& word) {
    FieldArray cur = phi_array(sheet, field);
    for (auto it = word.rbegin(); it != word.rend(); ++it)
        cur = apply_field(cur, *it);
    return cur;
}

std::vector<std::vector<VfName>> words_of_length(int n) {
    std::vector<std::vector<VfName>> out;
    if (n < 0) return out;
    out.push_back({});
    for (int len = 0; len < n; ++len) {
        std::vector<std::vector<VfName>> next;
        next.reserve(out.size() * 3);
        for (const auto& w : out)
            for (VfName z : {VfName::T, VfName::S, VfName::B}) {
                auto e = w;
                e.push_back(z);
                next.push_back(std::move(e));
            }
        out = std::move(next);
    }
    return out;
}

std::vector<std::vector<VfName>> words_up_to(int n) {
    std::vector<std::vector<VfName>> out;
    for (int len = 0; len <= n; ++len) {
        auto w = words_of_length(len);
        out.insert(out.end(), w.begin(), w.end());
    }
    return out;
}

int word_translations(const std::vector<VfName>& word) {
    int c = 0;
    for (VfName z : word)
        if (z == VfName::T) ++c;
    return c;
}

std::string word_name(const std::vector<VfName>& word) {
    if (word.empty()) return "1";
    std::string s;
    for (VfName z : word) s += static_cast<char>(z);
    return s;
}

double field_identity_residual(const SolutionSheet& sheet, int field) {
    const DoubleNullGrid& g = sheet.grid();
    const FieldArray ph = phi_array(sheet, field);
    const FieldArray lg = l_of(ph);
    const FieldArray lbg = lbar_of(ph);
    const FieldArray tph = fuse(lg, lbg, VfName::T);
    const FieldArray sph = fuse(lg, lbg, VfName::S);
    const FieldArray bph = fuse(lg, lbg, VfName::B);

    double worst = 0.0;
    for (int j = 0; j < ph.valid_levels; ++j) {
        const double ub = g.ubar(j);
        for (int i = g.i_lo(j); i <= g.i_hi(j); ++i) {
            const double u = g.unode(i);
            const double t = u + ub, r = ub - u;
            const double q = t * t - r * r;
            const double rph = 0.5 * (lg.at(i, j) - lbg.at(i, j));
            const double res_t = t * sph.at(i, j) - r * bph.at(i, j) - q * tph.at(i, j);
            const double res_r = t * bph.at(i, j) - r * sph.at(i, j) - q * rph;
            const double scale = 1.0 + std::abs(q) * (std::abs(tph.at(i, j)) + std::abs(rph));
            worst = std::max(worst, std::max(std::abs(res_t), std::abs(res_r)) / scale);
        }
    }
    return worst;
}

} // namespace nullpulse
