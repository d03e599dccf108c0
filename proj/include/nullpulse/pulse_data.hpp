#ifndef NULLPULSE_PULSE_DATA_HPP
#define NULLPULSE_PULSE_DATA_HPP

#include <array>
#include <string>
#include <vector>

#include "nullpulse/null_forms.hpp"

namespace nullpulse {

/// Compactly supported bump on [0, 1], normalized to peak value 1.  The
/// polynomial kind is C s^p (1-s)^q with integer exponents, smooth enough at
/// the endpoints for every derivative the scheme and the norms consume.
class PulseProfile {
public:
    PulseProfile() : PulseProfile("polynomial_bump", {10.0, 10.0}) {}
    PulseProfile(const std::string& kind, const std::vector<double>& params);

    const std::string& kind() const { return kind_; }
    int p() const { return p_; }
    int q() const { return q_; }
    /// Normalization constant C.
    double norm_const() const { return cnorm_; }

    double value(double s) const { return derivative(s, 0); }
    /// Exact k-th derivative; zero outside the open support.
    double derivative(double s, int k) const;
    /// Exact antiderivative from 0, for the explicit linear solution.
    double antiderivative(double s) const;

private:
    std::string kind_;
    int p_ = 10, q_ = 10;
    double cnorm_ = 0.0;
};

/// Ingoing pulse data posed on the unit sphere at t = 1: the profile rides on
/// the shell 1 - 2 delta <= r <= 1 with amplitude scaled by delta^{1/2}, and
/// the velocity is tuned so the outgoing derivative vanishes identically at
/// t = 1.  Every component of a multi-field system carries the same data.
struct ShortPulseData {
    double delta = 0.05;
    double amplitude = 1.0;
    PulseProfile profile;
    int n_fields = 1;

    double r_inner() const { return 1.0 - 2.0 * delta; }

    double phi0(double r) const { return phi0_deriv(r, 0); }
    double phi0_deriv(double r, int k) const;
    double phi1(double r) const { return -phi0_deriv(r, 1); }
    double phi1_deriv(double r, int k) const { return -phi0_deriv(r, k + 1); }

    static ShortPulseData make(double delta, double amplitude,
                               PulseProfile profile = PulseProfile(),
                               int n_fields = 1);
};

/// L2 energy of the k-th derivative pair on the initial slice,
/// int |grad^{k+1} phi0|^2 + |grad^k phi1|^2 dx, for k <= 2.  The quadrature
/// step must resolve the shell (step <= delta/16).  Scales like delta^{-2k}.
double initial_classical_energy(const ShortPulseData& data, int k, double step);

/// Triangular table of mixed partials d_t^a d_r^b phi at a point of the data
/// surface, filled the rows a >= 2 through the evolution equation so that
/// commuting vector fields can be applied algebraically.
class TaylorTable {
public:
    /// Highest total derivative order carried.
    static constexpr int MaxTotal = 6;
    static constexpr int Slots = (MaxTotal + 1) * (MaxTotal + 2) / 2;

    /// Per-field derivative table at a fixed point, together with the point
    /// itself since the scaling and boost fields weight by t and r.
    struct Table {
        std::array<double, Slots> v{};
        int order = MaxTotal;
        double t = 1.0, r = 0.0;

        double at(int a, int b) const { return v[static_cast<std::size_t>(idx(a, b))]; }
        double& at(int a, int b) { return v[static_cast<std::size_t>(idx(a, b))]; }
        static int idx(int a, int b) {
            const int d = a + b;
            return d * (d + 1) / 2 + b;
        }
    };

    TaylorTable(const ShortPulseData& data, const SystemCoupling& coupling, double r);

    const Table& field(int f) const { return tables_[static_cast<std::size_t>(f)]; }
    int n_fields() const { return static_cast<int>(tables_.size()); }

private:
    std::vector<Table> tables_;
};

/// Table for Z g given the table for g, where Z is one of the commuting
/// fields.  The top total order of the result is no longer known, so the
/// valid order drops by one.
TaylorTable::Table apply_vf(const TaylorTable::Table& tbl, VfName z);

/// (d_t + d_r) g at the table's base point.
double l_value(const TaylorTable::Table& tbl);
/// (d_t - d_r) g at the table's base point.
double lbar_value(const TaylorTable::Table& tbl);

/// One summand of the weighted initial norm.
struct InitialNormRow {
    std::string word;      // commuting fields applied, outermost first
    int n_bad = 0;         // translations in the word
    double l2_lbar = 0.0;  // || Lbar w phi ||_{L2} over the shell
    double l2_l = 0.0;     // || L w phi ||_{L2}
};

struct InitialNormBreakdown {
    double total = 0.0;
    std::vector<InitialNormRow> rows;
};

/// Weighted norm of the data through word length n (n <= 3): for each word w
/// over the commuting fields with n_bad translations, the incoming part
/// enters with weight delta^{n_bad} and the outgoing part with
/// delta^{n_bad - 1}, both in L2 of the shell with measure 4 pi r^2 dr.
/// Angular terms vanish identically in spherical symmetry.  The alpha weight
/// used on evolved cones degenerates to an order-one constant on the shell
/// and is not applied here.
InitialNormBreakdown initial_weighted_norm_detail(const ShortPulseData& data,
                                                  const SystemCoupling& coupling,
                                                  int n, double alpha);
double initial_weighted_norm(const ShortPulseData& data,
                             const SystemCoupling& coupling,
                             int n, double alpha);

} // namespace nullpulse

#endif
