#ifndef NULLPULSE_GRID_HPP
#define NULLPULSE_GRID_HPP

#include <cstdint>
#include <functional>
#include <vector>

namespace nullpulse {

/// Location of an outgoing-coordinate value relative to the pulse: ahead of
/// the leading edge (u < 0, identically quiet), inside the pulse strip
/// (0 <= u <= delta), or behind it.
enum class RegionTag { Ahead, Pulse, Interior };

enum class SliceKind {
    ConeOut,    // fixed u, parameter ubar
    ConeIn,     // fixed ubar, parameter u
    TimeSlice   // fixed t = u + ubar, parameter u (r = t - 2u)
};

/// One evaluation point of a slice with its quadrature weight.  The weight
/// already contains the 4 pi r^2 area factor and, for time slices, the
/// Jacobian between the running parameter and r.
struct SlicePoint {
    double u = 0.0, ubar = 0.0, r = 0.0;
    double weight = 0.0;
};

struct ConeSlice {
    SliceKind kind = SliceKind::ConeOut;
    double value = 0.0;        // the frozen coordinate (u, ubar, or t)
    double lo = 0.0, hi = 0.0; // parameter range actually covered
    std::vector<SlicePoint> pts;

    bool empty() const { return pts.empty(); }
    /// Sum of weights, the measured area of the truncated surface.
    double total_weight() const;
};

/// Characteristic mesh shared by both null directions.  A single master node
/// set X covers [-delta, ubar_max]; outgoing columns use X up to u_cap and
/// incoming levels use X from 1/2 upward.  X is uniform and fine on
/// [-delta, 5 delta], mirrored through x -> 1 - x onto the window around the
/// light cone ubar ~ 1, and geometrically graded toward h_coarse in between
/// and in the far tail, never letting adjacent spacings differ by more than
/// 20 percent.  The mirror makes the initial surface t = 1 pass exactly
/// through node pairs (X[m - j], X[m + j]) with X[m] = 1/2, so the domain is
/// indexed by levels j (incoming) and columns i (outgoing) with
///   i_lo(j) = max(0, m - j),  i_hi(j) = min(iu_max, m + j),
/// the left end being the data surface for j <= m and the quiet inflow
/// boundary afterwards, the right end being the axis until u_cap truncates it.
class DoubleNullGrid {
public:
    static DoubleNullGrid build(double delta, double ubar_max, double h_fine,
                                double h_coarse, double u_cap = -1.0);

    double delta() const { return delta_; }
    double ubar_max() const { return ubar_max_; }
    double u_cap() const { return u_cap_; }
    double h_fine() const { return h_fine_; }
    double h_coarse() const { return h_coarse_; }

    int master_size() const { return static_cast<int>(master_.size()); }
    double master(int k) const { return master_[static_cast<std::size_t>(k)]; }

    /// Index of 1/2 in the master set.
    int m_index() const { return m_; }
    /// Largest usable column index (outgoing truncation).
    int iu_max() const { return iu_max_; }

    int levels() const { return static_cast<int>(master_.size()) - m_; }
    double ubar(int j) const { return master_[static_cast<std::size_t>(m_ + j)]; }
    double unode(int i) const { return master_[static_cast<std::size_t>(i)]; }

    int i_lo(int j) const { return j < m_ ? m_ - j : 0; }
    int i_hi(int j) const { return m_ + j < iu_max_ ? m_ + j : iu_max_; }

    bool on_surface(int i, int j) const { return j <= m_ && i == m_ - j; }
    bool on_axis(int i, int j) const { return i == m_ + j && i <= iu_max_; }
    bool is_inflow(int i, int j) const { return i == 0 && j > m_; }

    /// First level at which column i exists.
    int j_first(int i) const { return i < m_ ? m_ - i : i - m_; }

    std::int64_t node_index(int i, int j) const {
        return offsets_[static_cast<std::size_t>(j)] + (i - i_lo(j));
    }
    int row_length(int j) const { return i_hi(j) - i_lo(j) + 1; }
    std::int64_t node_count() const { return total_nodes_; }

    RegionTag region_of_u(double u) const {
        if (u < 0.0) return RegionTag::Ahead;
        if (u <= delta_) return RegionTag::Pulse;
        return RegionTag::Interior;
    }

    /// Largest j with ubar(j) <= ub (clamped to [0, levels - 1]).
    int find_level(double ub) const;
    /// Largest i <= iu_max with unode(i) <= u (clamped to [0, iu_max]).
    int find_ucol(double u) const;

    /// Midpoint-refined copy.  Existing nodes keep their exact values, so
    /// coarse node (i, j) coincides with fine node (2i, 2j).
    DoubleNullGrid bisect() const;

    /// FNV-1a hash of the geometry, used to match checkpoints to grids.
    std::uint64_t content_hash() const;

private:
    DoubleNullGrid() = default;
    void finalize(double delta, double ubar_max, double h_fine, double h_coarse,
                  double u_cap);

    std::vector<double> master_;
    std::vector<std::int64_t> offsets_;
    std::int64_t total_nodes_ = 0;
    int m_ = 0;
    int iu_max_ = 0;
    double delta_ = 0.0, ubar_max_ = 0.0, u_cap_ = 0.0;
    double h_fine_ = 0.0, h_coarse_ = 0.0;
};

/// Sample points and trapezoid weights for a truncated cone, incoming cone,
/// or constant-time slice, clipped to the domain and to [param_lo, param_hi].
/// Endpoints that are not grid values are included exactly, so the total
/// weight converges to the analytic area of the truncated surface at second
/// order.
ConeSlice extract_cone(const DoubleNullGrid& grid, SliceKind kind, double value,
                       double param_lo = -1e300, double param_hi = 1e300);

/// Bilinear interpolation of a node-indexed quantity at (u, ub), restricted to
/// the first `valid_levels` levels.  Exact on nodes and grid lines.  Where the
/// enclosing cell loses a corner against the data surface rim the weights
/// renormalize over the available corners, which is first order but confined
/// to a one-cell strip.  Throws partial_flux_error above the computed levels
/// and input_error outside the grid.
double interp_on_levels(const DoubleNullGrid& g, int valid_levels, double u,
                        double ub, const std::function<double(int, int)>& value);

} // namespace nullpulse

#endif
