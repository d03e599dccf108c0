#ifndef NULLPULSE_NULL_FORMS_HPP
#define NULLPULSE_NULL_FORMS_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace nullpulse {

/// Constant-coefficient quadratic form A^{ab} d_a phi d_b psi on Minkowski
/// space, stored row-major with index 0 the time direction.  The two argument
/// slots may refer to different components of a multi-field system.
struct QuadraticForm {
    std::array<double, 16> a{};
    int field_j = 0;    // field fed into the first slot
    int field_k = 0;    // field fed into the second slot

    double operator()(int al, int be) const { return a[4 * al + be]; }
    double& at(int al, int be) { return a[4 * al + be]; }

    double max_abs() const;
    QuadraticForm symmetric_part() const;

    QuadraticForm& operator+=(const QuadraticForm& o);
    QuadraticForm& operator*=(double s);
    friend QuadraticForm operator+(QuadraticForm x, const QuadraticForm& y) { return x += y; }
    friend QuadraticForm operator*(QuadraticForm x, double s) { return x *= s; }
    friend QuadraticForm operator*(double s, QuadraticForm x) { return x *= s; }

    /// The form with matrix equal to the Minkowski metric, ie
    /// -d_t phi d_t psi + grad phi . grad psi.
    static QuadraticForm metric_form(int j = 0, int k = 0);

    /// Antisymmetric rotation-boost form d_al phi d_be psi - d_be phi d_al psi.
    static QuadraticForm rotation_form(int al, int be, int j = 0, int k = 0);

    /// (d_t phi)(d_t psi), the classical counterexample to small-data decay.
    static QuadraticForm time_squared(int j = 0, int k = 0);

    static QuadraticForm zero(int j = 0, int k = 0);
};

/// Covector along which a non-null form fails to annihilate the light cone,
/// together with the offending value A(xi, xi).
struct NullWitness {
    std::array<double, 4> xi{};
    double value = 0.0;
};

/// Decides, by inspecting the symmetric part, whether the form annihilates all
/// null covectors.  That holds exactly when sym(A) is a real multiple of the
/// metric.  On failure an optional witness receives a null covector xi with
/// A(xi, xi) farthest from zero over a directional scan.
bool check_null_condition(const QuadraticForm& form, NullWitness* witness = nullptr);

/// Restriction of a quadratic form to spherically symmetric arguments, written
/// in the derivatives L = d_t + d_r and Lbar = d_t - d_r:
///   Q = c_ll L phi L psi + c_lb L phi Lbar psi + c_bl Lbar phi L psi
///       + c_bb Lbar phi Lbar psi.
/// Forms that pass the null condition always reduce with c_ll = c_bb = 0.
struct RadialNullFrameForm {
    double c_ll = 0.0, c_lb = 0.0, c_bl = 0.0, c_bb = 0.0;
    int field_j = 0, field_k = 0;

    double evaluate(double lphi, double lbphi, double lpsi, double lbpsi) const {
        return c_ll * lphi * lpsi + c_lb * lphi * lbpsi
             + c_bl * lbphi * lpsi + c_bb * lbphi * lbpsi;
    }
    double max_abs() const;
    bool is_zero(double tol = 0.0) const;
};

/// Reduces a form to its radial null-frame coefficients.  Throws
/// reduction_error when the restriction to radial gradients is not itself a
/// radial function (nonzero time-space entries after accounting for slot
/// symmetry, or an anisotropic symmetric spatial block).
RadialNullFrameForm reduce_to_null_frame(const QuadraticForm& form);

/// Monte-Carlo check of the pointwise product bound for reduced null forms:
/// returns the largest sampled ratio
///   |Q| / (|L phi||Lbar psi| + |Lbar phi||L psi| + guard),
/// which must not exceed max(|c_lb|, |c_bl|).  Requires c_ll = c_bb = 0.
double nullform_pointwise_bound_check(const RadialNullFrameForm& q,
                                      int n_samples = 10000,
                                      std::uint32_t seed = 20260822u);

/// Names for the reduced commuting fields: translation d_t, the scaling field
/// t d_t + r d_r, and the boost r d_t + t d_r.
enum class VfName : char { T = 'T', S = 'S', B = 'B' };

/// Correction form picked up when a commuting field Z passes through the
/// quadratic source: Z Q(phi, psi) = Q(Z phi, psi) + Q(phi, Z psi) + Qtilde.
/// For Z = T the correction vanishes, for Z = S it is -2 Q, and for Z = B it
/// flips the extreme coefficients, which is again zero on null forms.
RadialNullFrameForm commutator_correction(const RadialNullFrameForm& q, VfName z);

/// One quadratic source term of a first-order system: the form's value, with
/// arguments taken from fields (form.field_j, form.field_k), feeds the wave
/// equation of component `target`.
struct CouplingTerm {
    int target = 0;
    QuadraticForm form;
};

/// A semilinear system box phi_I = sum of quadratic terms.  Reduction of every
/// term is cached at construction so the marching loop works purely with
/// radial coefficients.
class SystemCoupling {
public:
    SystemCoupling() = default;
    SystemCoupling(int n_fields, std::vector<CouplingTerm> terms);

    int n_fields() const { return n_fields_; }
    const std::vector<CouplingTerm>& terms() const { return terms_; }

    /// Reduced terms feeding field I.
    const std::vector<RadialNullFrameForm>& reduced_terms(int target) const {
        return reduced_[static_cast<std::size_t>(target)];
    }

    bool all_null() const { return all_null_; }
    bool empty() const { return terms_.empty(); }

    /// Source values for every field from the radial first derivatives
    /// lphi[f], lbphi[f] of the two argument slots.
    void source(const double* lphi, const double* lbphi, double* out) const;

private:
    int n_fields_ = 1;
    std::vector<CouplingTerm> terms_;
    std::vector<std::vector<RadialNullFrameForm>> reduced_;
    bool all_null_ = true;
};

std::string to_string(VfName z);

} // namespace nullpulse

#endif
