#include "nullpulse/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <utility>

#include "json.hpp"

#include "nullpulse/errors.hpp"
#include "nullpulse/stencils.hpp"

namespace nullpulse {

namespace {

constexpr double DERIV_COLLAR = 0.1;  // radius below which 1/r reconstruction
                                      // pollutes measured derivative orders

// 3-point Gauss panel on [-1, 1].
constexpr double G3_X[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
constexpr double G3_W[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

std::string node_label(const DoubleNullGrid& g, int i, int j) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "node (i=%d, j=%d) at u=%.6g, ubar=%.6g", i, j,
                  g.unode(i), g.ubar(j));
    return buf;
}

} // namespace

SolutionSheet::SolutionSheet(const DoubleNullGrid& grid, int n_fields)
    : grid_(&grid), n_fields_(n_fields) {
    if (n_fields < 1) throw input_error("sheet needs at least one field");
    psi_.assign(static_cast<std::size_t>(n_fields),
                std::vector<double>(static_cast<std::size_t>(grid.node_count()), 0.0));
}

bool SolutionSheet::covers_ubar(double ub) const {
    if (valid_levels_ == 0) return false;
    const double top = grid_->ubar(valid_levels_ - 1);
    return ub <= top + 1e-12 * (1.0 + std::abs(top));
}

double SolutionSheet::phi(int field, int i, int j) const {
    const double r = grid_->ubar(j) - grid_->unode(i);
    if (!grid_->on_axis(i, j)) return psi(field, i, j) / r;
    if (j == 0) return 0.0;
    // Axis limit psi / r -> -d_u psi, one sided along the row.
    const double x0 = grid_->unode(i), x1 = grid_->unode(i - 1), x2 = grid_->unode(i - 2);
    return -quad_deriv(x0, psi(field, i, j), x1, psi(field, i - 1, j), x2,
                       psi(field, i - 2, j), x0);
}

double SolutionSheet::lphi(int field, int i, int j) const {
    const int jf = grid_->j_first(i);
    const int jl = valid_levels_ - 1;
    const int span = jl - jf + 1;
    if (span < 2) return 0.0;
    if (span == 2) {
        const double f0 = phi(field, i, jf), f1 = phi(field, i, jf + 1);
        return (f1 - f0) / (grid_->ubar(jf + 1) - grid_->ubar(jf));
    }
    int ja = j - 1;
    if (j == jf) ja = jf;
    if (j == jl) ja = jl - 2;
    return quad_deriv(grid_->ubar(ja), phi(field, i, ja),
                      grid_->ubar(ja + 1), phi(field, i, ja + 1),
                      grid_->ubar(ja + 2), phi(field, i, ja + 2), grid_->ubar(j));
}

double SolutionSheet::lbphi(int field, int i, int j) const {
    const int il = grid_->i_lo(j), ih = grid_->i_hi(j);
    const int span = ih - il + 1;
    if (span < 2) return 0.0;
    if (span == 2) {
        const double f0 = phi(field, il, j), f1 = phi(field, il + 1, j);
        return (f1 - f0) / (grid_->unode(il + 1) - grid_->unode(il));
    }
    int ia = i - 1;
    if (i == il) ia = il;
    if (i == ih) ia = ih - 2;
    return quad_deriv(grid_->unode(ia), phi(field, ia, j),
                      grid_->unode(ia + 1), phi(field, ia + 1, j),
                      grid_->unode(ia + 2), phi(field, ia + 2, j), grid_->unode(i));
}

double SolutionSheet::value(Quantity q, int field, int i, int j) const {
    switch (q) {
        case Quantity::Psi: return psi(field, i, j);
        case Quantity::Phi: return phi(field, i, j);
        case Quantity::LPhi: return lphi(field, i, j);
        case Quantity::LbarPhi: return lbphi(field, i, j);
    }
    return 0.0;
}

double SolutionSheet::interp(Quantity q, int field, double u, double ub) const {
    return interp_on_levels(*grid_, valid_levels_, u, ub,
                            [&](int i, int j) { return value(q, field, i, j); });
}

namespace {

// Incoming derivative of psi restricted to the data surface, as a function of
// u with r = 1 - 2u there.
double lbpsi_on_surface(const ShortPulseData& data, double u) {
    const double r = 1.0 - 2.0 * u;
    return -data.phi0(r) - 2.0 * r * data.phi0_deriv(r, 1);
}

struct MarchScratch {
    std::vector<double> base, cur, next, lph, lbph, src, row_phi;
};

// Shared corrector: starting from the source-free value base[f], iterate
//   N[f] = base[f] + cellfac * Q_f(centroid derivatives of the current N)
// until the relative update stalls below tol.  eval fills lph/lbph from the
// current iterate.  Returns true with the result in scratch.cur, or false
// after filling rep when the iteration stops contracting at a large incoming
// derivative.  The fixed point exists only while the source feedback per
// sweep stays below one; the feedback grows with |lbar phi|, so a stall at
// large amplitude is the discrete form of gradient collapse and is reported
// as a blow-up at this cell.  A stall at small amplitude is a genuine
// scheme failure and still throws.
template <typename Eval>
bool correct_cell(const DoubleNullGrid& g, const SystemCoupling& coupling,
                  const EvolutionParams& params, MarchScratch& s, int nf,
                  double cellfac, Eval&& eval, int i, int j, BlowUpReport& rep) {
    s.cur = s.base;
    if (coupling.empty()) return true;
    double rel = 0.0;
    for (int it = 0; it < params.corrector_max; ++it) {
        eval(s.cur, s.lph, s.lbph);
        coupling.source(s.lph.data(), s.lbph.data(), s.src.data());
        rel = 0.0;
        for (int f = 0; f < nf; ++f) {
            const double nn = s.base[f] + cellfac * s.src[f];
            rel = std::max(rel, std::abs(nn - s.cur[f]) / (1.0 + std::abs(nn)));
            s.next[f] = nn;
        }
        std::swap(s.cur, s.next);
        if (rel < params.corrector_tol) return true;
    }
    if (rel > 100.0 * params.corrector_tol) {
        double mag = 0.0;
        for (int f = 0; f < nf; ++f) mag = std::max(mag, std::abs(s.lbph[static_cast<std::size_t>(f)]));
        if (mag >= 0.05 * params.blowup_threshold) {
            rep.detected = true;
            rep.level = j;
            rep.u = g.unode(i);
            rep.ubar = g.ubar(j);
            rep.t = rep.u + rep.ubar;
            rep.peak = mag;
            rep.quantity = "corrector_divergence";
            return false;
        }
        throw solver_error("cell corrector stalled at " + node_label(g, i, j) +
                           " with relative update " + std::to_string(rel));
    }
    return true;
}

// Computes row j of psi.  Returns false if the cell corrector diverged at
// large amplitude; the row is then incomplete and rep describes the frontier.
bool march_level(SolutionSheet& sheet, std::vector<std::vector<double>>& psi,
                 const ShortPulseData& data, const SystemCoupling& coupling,
                 const EvolutionParams& params, MarchScratch& s, int j,
                 BlowUpReport& rep) {
    const DoubleNullGrid& g = sheet.grid();
    const int nf = sheet.n_fields();
    const int il = g.i_lo(j), ih = g.i_hi(j);

    if (j == 0) {
        const std::int64_t n = g.node_index(il, 0);
        for (int f = 0; f < nf; ++f) psi[static_cast<std::size_t>(f)][static_cast<std::size_t>(n)] = 0.0;
        return true;
    }

    const double ubj = g.ubar(j);
    const double dub = ubj - g.ubar(j - 1);

    for (int i = il; i <= ih; ++i) {
        const std::int64_t n = g.node_index(i, j);
        if (g.on_surface(i, j)) {
            const double r = ubj - g.unode(i);
            const double v = r * data.phi0(r);
            for (int f = 0; f < nf; ++f) psi[static_cast<std::size_t>(f)][static_cast<std::size_t>(n)] = v;
            continue;
        }
        if (g.is_inflow(i, j) || g.on_axis(i, j)) {
            for (int f = 0; f < nf; ++f) psi[static_cast<std::size_t>(f)][static_cast<std::size_t>(n)] = 0.0;
            continue;
        }

        const double ui = g.unode(i);
        const double du = ui - g.unode(i - 1);
        const std::int64_t nE = g.node_index(i - 1, j);
        const std::int64_t nW = g.node_index(i, j - 1);

        if (j <= g.m_index() && g.on_surface(i - 1, j)) {
            // Triangle cell against the data surface: corners E = (i-1, j) and
            // W = (i, j-1) both lie on it, and the hypotenuse E-W is exactly
            // the surface segment.  Integrating the evolution identity over
            // the triangle gives
            //   psi_N = psi_E + int_(u_{i-1})^(u_i) (d_u psi)|_surface du
            //           + area * (-r_c * Q_c).
            const double ua = g.unode(i - 1);
            double seg = 0.0;
            for (int k = 0; k < 3; ++k) {
                const double uu = 0.5 * (ua + ui) + 0.5 * du * G3_X[k];
                seg += 0.5 * du * G3_W[k] * lbpsi_on_surface(data, uu);
            }
            const double uc = (ua + 2.0 * ui) / 3.0;
            const double ubc = (g.ubar(j - 1) + 2.0 * ubj) / 3.0;
            const double rc = ubc - uc;
            const double cellfac = -0.5 * du * dub * rc;
            for (int f = 0; f < nf; ++f) {
                const auto fs = static_cast<std::size_t>(f);
                s.base[fs] = psi[fs][static_cast<std::size_t>(nE)] + seg;
            }
            auto eval = [&](const std::vector<double>& cur, std::vector<double>& lph,
                            std::vector<double>& lbph) {
                for (int f = 0; f < nf; ++f) {
                    const auto fs = static_cast<std::size_t>(f);
                    const double E = psi[fs][static_cast<std::size_t>(nE)];
                    const double W = psi[fs][static_cast<std::size_t>(nW)];
                    const double N = cur[fs];
                    const double pc = (E + W + N) / 3.0;
                    const double dpub = (N - W) / dub;
                    const double dpu = (N - E) / du;
                    lph[fs] = dpub / rc - pc / (rc * rc);
                    lbph[fs] = dpu / rc + pc / (rc * rc);
                }
            };
            if (!correct_cell(g, coupling, params, s, nf, cellfac, eval, i, j, rep))
                return false;
            for (int f = 0; f < nf; ++f)
                psi[static_cast<std::size_t>(f)][static_cast<std::size_t>(n)] = s.cur[static_cast<std::size_t>(f)];
            continue;
        }

        // Diamond cell with corners S = (i-1, j-1), W = (i, j-1), E = (i-1, j).
        const std::int64_t nS = g.node_index(i - 1, j - 1);
        const double uc = ui - 0.5 * du;
        const double ubc = ubj - 0.5 * dub;
        const double rc = ubc - uc;
        const double cellfac = -du * dub * rc;
        for (int f = 0; f < nf; ++f) {
            const auto fs = static_cast<std::size_t>(f);
            s.base[fs] = psi[fs][static_cast<std::size_t>(nE)] + psi[fs][static_cast<std::size_t>(nW)] -
                         psi[fs][static_cast<std::size_t>(nS)];
        }
        auto eval = [&](const std::vector<double>& cur, std::vector<double>& lph,
                        std::vector<double>& lbph) {
            for (int f = 0; f < nf; ++f) {
                const auto fs = static_cast<std::size_t>(f);
                const double S = psi[fs][static_cast<std::size_t>(nS)];
                const double W = psi[fs][static_cast<std::size_t>(nW)];
                const double E = psi[fs][static_cast<std::size_t>(nE)];
                const double N = cur[fs];
                const double pc = 0.25 * (S + W + E + N);
                const double dpub = ((E - S) + (N - W)) / (2.0 * dub);
                const double dpu = ((W - S) + (N - E)) / (2.0 * du);
                lph[fs] = dpub / rc - pc / (rc * rc);
                lbph[fs] = dpu / rc + pc / (rc * rc);
            }
        };
        if (!correct_cell(g, coupling, params, s, nf, cellfac, eval, i, j, rep))
            return false;
        for (int f = 0; f < nf; ++f)
            psi[static_cast<std::size_t>(f)][static_cast<std::size_t>(n)] = s.cur[static_cast<std::size_t>(f)];
    }
    return true;
}

// Scan the freshly computed row for loss of regularity.  Non-finite values
// are caught directly; a growing incoming derivative is estimated from the
// difference quotient of phi along the row, which needs no stencil into rows
// that do not exist yet.
bool scan_row(const SolutionSheet& sheet, const EvolutionParams& params,
              MarchScratch& s, int j, BlowUpReport& rep) {
    const DoubleNullGrid& g = sheet.grid();
    const int il = g.i_lo(j), ih = g.i_hi(j);
    const double ubj = g.ubar(j);
    for (int f = 0; f < sheet.n_fields(); ++f) {
        for (int i = il; i <= ih; ++i) {
            const double v = sheet.psi(f, i, j);
            if (!std::isfinite(v)) {
                rep.detected = true;
                rep.level = j;
                rep.u = g.unode(i);
                rep.ubar = ubj;
                rep.t = rep.u + rep.ubar;
                rep.peak = std::numeric_limits<double>::infinity();
                rep.quantity = "non_finite";
                return true;
            }
        }
        if (ih - il < 1) continue;
        for (int i = il; i <= ih; ++i)
            s.row_phi[static_cast<std::size_t>(i - il)] = sheet.phi(f, i, j);
        for (int i = il + 1; i <= ih; ++i) {
            const double du = g.unode(i) - g.unode(i - 1);
            const double slope = (s.row_phi[static_cast<std::size_t>(i - il)] -
                                  s.row_phi[static_cast<std::size_t>(i - il - 1)]) / du;
            if (std::abs(slope) > params.blowup_threshold) {
                rep.detected = true;
                rep.level = j;
                rep.u = 0.5 * (g.unode(i) + g.unode(i - 1));
                rep.ubar = ubj;
                rep.t = rep.u + rep.ubar;
                rep.peak = std::abs(slope);
                rep.quantity = "incoming_derivative";
                return true;
            }
        }
    }
    return false;
}

} // namespace

void continue_march(SolutionSheet& sheet, const ShortPulseData& data,
                    const SystemCoupling& coupling, const EvolutionParams& params) {
    const DoubleNullGrid& g = *sheet.grid_;
    const int nf = sheet.n_fields_;
    if (data.n_fields != nf)
        throw input_error("data field count does not match the sheet");
    if (!coupling.empty() && coupling.n_fields() != nf)
        throw input_error("coupling field count does not match the sheet");
    if (sheet.blowup_.detected) return;

    MarchScratch s;
    s.base.resize(static_cast<std::size_t>(nf));
    s.cur.resize(static_cast<std::size_t>(nf));
    s.next.resize(static_cast<std::size_t>(nf));
    s.lph.resize(static_cast<std::size_t>(nf));
    s.lbph.resize(static_cast<std::size_t>(nf));
    s.src.resize(static_cast<std::size_t>(nf));
    s.row_phi.resize(static_cast<std::size_t>(g.iu_max() + 1));

    const int jtop = g.levels();
    for (int j = sheet.valid_levels_; j < jtop; ++j) {
        if (!march_level(sheet, sheet.psi_, data, coupling, params, s, j, sheet.blowup_) ||
            scan_row(sheet, params, s, j, sheet.blowup_)) {
            if (params.progress && params.progress_every > 0) params.progress(sheet, j);
            return;
        }
        sheet.valid_levels_ = j + 1;
        if (params.progress && params.progress_every > 0 &&
            (j % params.progress_every == 0 || j == jtop - 1))
            params.progress(sheet, j);
    }
}

SolutionSheet evolve(const ShortPulseData& data, const SystemCoupling& coupling,
                     const DoubleNullGrid& grid, const EvolutionParams& params) {
    SolutionSheet sheet(grid, data.n_fields);
    continue_march(sheet, data, coupling, params);
    return sheet;
}

namespace {

std::string hash_hex(std::uint64_t h) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::int64_t valid_node_count(const DoubleNullGrid& g, int valid_levels) {
    if (valid_levels <= 0) return 0;
    const int jl = valid_levels - 1;
    return g.node_index(g.i_lo(jl), jl) + g.row_length(jl);
}

} // namespace

void write_checkpoint(const SolutionSheet& sheet, const std::string& dir,
                      const std::string& config_fingerprint) {
    namespace fs = std::filesystem;
    const DoubleNullGrid& g = sheet.grid();
    fs::create_directories(dir);

    const std::int64_t n = valid_node_count(g, sheet.valid_levels());
    const fs::path bin = fs::path(dir) / "psi.bin";
    const fs::path bin_tmp = fs::path(dir) / "psi.bin.tmp";
    {
        std::ofstream out(bin_tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw solver_error("cannot open checkpoint file " + bin_tmp.string());
        std::vector<double> buf;
        for (int f = 0; f < sheet.n_fields(); ++f) {
            buf.clear();
            buf.reserve(static_cast<std::size_t>(n));
            for (int j = 0; j < sheet.valid_levels(); ++j)
                for (int i = g.i_lo(j); i <= g.i_hi(j); ++i)
                    buf.push_back(sheet.psi(f, i, j));
            out.write(reinterpret_cast<const char*>(buf.data()),
                      static_cast<std::streamsize>(buf.size() * sizeof(double)));
        }
        if (!out) throw solver_error("short write to " + bin_tmp.string());
    }
    fs::rename(bin_tmp, bin);

    nlohmann::json man;
    man["format"] = "nullpulse-checkpoint-1";
    man["grid_hash"] = hash_hex(g.content_hash());
    man["n_fields"] = sheet.n_fields();
    man["valid_levels"] = sheet.valid_levels();
    man["config_fingerprint"] = config_fingerprint;
    const BlowUpReport& b = sheet.blowup();
    man["blowup"]["detected"] = b.detected;
    if (b.detected) {
        man["blowup"]["level"] = b.level;
        man["blowup"]["u"] = b.u;
        man["blowup"]["ubar"] = b.ubar;
        man["blowup"]["t"] = b.t;
        man["blowup"]["peak"] = b.peak;
        man["blowup"]["quantity"] = b.quantity;
    }
    const fs::path mf = fs::path(dir) / "manifest.json";
    const fs::path mf_tmp = fs::path(dir) / "manifest.json.tmp";
    {
        std::ofstream out(mf_tmp, std::ios::trunc);
        if (!out) throw solver_error("cannot open " + mf_tmp.string());
        out << man.dump(2) << "\n";
        if (!out) throw solver_error("short write to " + mf_tmp.string());
    }
    fs::rename(mf_tmp, mf);
}

SolutionSheet load_checkpoint(const DoubleNullGrid& grid, const std::string& dir,
                              const std::string& config_fingerprint) {
    namespace fs = std::filesystem;
    const fs::path mf = fs::path(dir) / "manifest.json";
    std::ifstream in(mf);
    if (!in) throw solver_error("no checkpoint manifest at " + mf.string());
    nlohmann::json man;
    try {
        in >> man;
    } catch (const nlohmann::json::exception& e) {
        throw solver_error("unreadable checkpoint manifest: " + std::string(e.what()));
    }
    if (man.value("format", "") != "nullpulse-checkpoint-1")
        throw solver_error("unknown checkpoint format");
    if (man.value("grid_hash", "") != hash_hex(grid.content_hash()))
        throw solver_error("checkpoint was written against a different grid");
    if (man.value("config_fingerprint", "") != config_fingerprint)
        throw solver_error("checkpoint was written under a different configuration");
    const int nf = man.value("n_fields", 0);
    const int vl = man.value("valid_levels", -1);
    if (nf < 1 || vl < 0 || vl > grid.levels())
        throw solver_error("checkpoint manifest out of range");

    SolutionSheet sheet(grid, nf);
    const std::int64_t n = valid_node_count(grid, vl);
    const fs::path bin = fs::path(dir) / "psi.bin";
    std::ifstream bs(bin, std::ios::binary);
    if (!bs) throw solver_error("no checkpoint payload at " + bin.string());
    for (int f = 0; f < nf; ++f) {
        bs.read(reinterpret_cast<char*>(sheet.psi_[static_cast<std::size_t>(f)].data()),
                static_cast<std::streamsize>(n) * static_cast<std::streamsize>(sizeof(double)));
        if (bs.gcount() != static_cast<std::streamsize>(n * 8))
            throw solver_error("checkpoint payload truncated");
    }
    char extra;
    if (bs.read(&extra, 1) && bs.gcount() == 1)
        throw solver_error("checkpoint payload larger than the manifest claims");
    sheet.valid_levels_ = vl;

    const auto& bj = man["blowup"];
    if (bj.is_object() && bj.value("detected", false)) {
        sheet.blowup_.detected = true;
        sheet.blowup_.level = bj.value("level", -1);
        sheet.blowup_.u = bj.value("u", 0.0);
        sheet.blowup_.ubar = bj.value("ubar", 0.0);
        sheet.blowup_.t = bj.value("t", 0.0);
        sheet.blowup_.peak = bj.value("peak", 0.0);
        sheet.blowup_.quantity = bj.value("quantity", "");
    }
    return sheet;
}

namespace {

struct SheetDistance {
    double psi_sup = 0.0;
    double deriv_sup = 0.0;
    double max() const { return std::max(psi_sup, deriv_sup); }
};

SheetDistance oracle_distance(const SolutionSheet& s, const LinearOracle& ora) {
    const DoubleNullGrid& g = s.grid();
    SheetDistance d;
    for (int j = 0; j < s.valid_levels(); ++j) {
        const double ub = g.ubar(j);
        for (int i = g.i_lo(j); i <= g.i_hi(j); ++i) {
            const double u = g.unode(i);
            for (int f = 0; f < s.n_fields(); ++f) {
                d.psi_sup = std::max(d.psi_sup, std::abs(s.psi(f, i, j) - ora.psi(u, ub)));
                if (ub - u >= DERIV_COLLAR) {
                    d.deriv_sup = std::max(d.deriv_sup,
                                           std::abs(s.lphi(f, i, j) - ora.lphi(u, ub)));
                    d.deriv_sup = std::max(d.deriv_sup,
                                           std::abs(s.lbphi(f, i, j) - ora.lbphi(u, ub)));
                }
            }
        }
    }
    return d;
}

// Distance between a run and the bisection refinement of its grid, sampled on
// the coarse nodes, which map to fine indices (2i, 2j).
SheetDistance pair_distance(const SolutionSheet& coarse, const SolutionSheet& fine) {
    const DoubleNullGrid& g = coarse.grid();
    SheetDistance d;
    for (int j = 0; j < coarse.valid_levels(); ++j) {
        if (2 * j >= fine.valid_levels()) break;
        const double ub = g.ubar(j);
        for (int i = g.i_lo(j); i <= g.i_hi(j); ++i) {
            const double u = g.unode(i);
            for (int f = 0; f < coarse.n_fields(); ++f) {
                d.psi_sup = std::max(d.psi_sup,
                                     std::abs(coarse.psi(f, i, j) - fine.psi(f, 2 * i, 2 * j)));
                if (ub - u >= DERIV_COLLAR) {
                    d.deriv_sup = std::max(d.deriv_sup, std::abs(coarse.lphi(f, i, j) -
                                                                 fine.lphi(f, 2 * i, 2 * j)));
                    d.deriv_sup = std::max(d.deriv_sup, std::abs(coarse.lbphi(f, i, j) -
                                                                 fine.lbphi(f, 2 * i, 2 * j)));
                }
            }
        }
    }
    return d;
}

} // namespace

ConvergenceReport convergence_study(const ShortPulseData& data,
                                    const SystemCoupling& coupling,
                                    const DoubleNullGrid& base_grid, int n_grids,
                                    const EvolutionParams& params,
                                    const LinearOracle* oracle) {
    if (n_grids < 2) throw input_error("refinement study needs at least two grids");
    if (oracle && !coupling.empty())
        throw input_error("closed-form comparison requires a source-free system");

    EvolutionParams quiet = params;
    quiet.progress = nullptr;
    quiet.progress_every = 0;

    std::vector<DoubleNullGrid> grids;
    grids.reserve(static_cast<std::size_t>(n_grids));
    grids.push_back(base_grid);
    for (int k = 1; k < n_grids; ++k) grids.push_back(grids.back().bisect());

    std::vector<SolutionSheet> sheets;
    sheets.reserve(grids.size());
    for (const auto& g : grids) {
        sheets.push_back(evolve(data, coupling, g, quiet));
        if (sheets.back().blowup().detected)
            throw solver_error("refinement study run blew up at t = " +
                               std::to_string(sheets.back().blowup().t));
    }

    ConvergenceReport rep;
    rep.mode = oracle ? "oracle" : "self";
    for (const auto& g : grids) rep.spacings.push_back(g.h_fine());

    if (oracle) {
        for (const auto& s : sheets) rep.errors.push_back(oracle_distance(s, *oracle).max());
    } else {
        for (std::size_t k = 0; k + 1 < sheets.size(); ++k)
            rep.errors.push_back(pair_distance(sheets[k], sheets[k + 1]).max());
    }

    double scale = 1.0;
    {
        const SolutionSheet& fin = sheets.back();
        const DoubleNullGrid& g = fin.grid();
        double sup = 0.0;
        for (int j = 0; j < fin.valid_levels(); ++j)
            for (int i = g.i_lo(j); i <= g.i_hi(j); ++i)
                for (int f = 0; f < fin.n_fields(); ++f)
                    sup = std::max(sup, std::abs(fin.psi(f, i, j)));
        scale += sup;
    }

    rep.exact = true;
    for (double e : rep.errors)
        if (e > 1e-13 * scale) rep.exact = false;
    if (!rep.exact)
        for (std::size_t k = 0; k + 1 < rep.errors.size(); ++k) {
            const double a = rep.errors[k], b = rep.errors[k + 1];
            if (a > 0.0 && b > 0.0) rep.orders.push_back(std::log2(a / b));
        }
    return rep;
}

} // namespace nullpulse
