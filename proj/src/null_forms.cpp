// Quadratic forms on gradients, the null condition, and the reduction of both
// to the radial null frame used by the spherically symmetric solver.

#include "nullpulse/null_forms.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "nullpulse/errors.hpp"

namespace nullpulse {

namespace {

/// Relative tolerance for the algebraic null and reducibility decisions.
const double ALGEBRA_TOL = 1e-12;

/// Floor added to denominators in the sampled product-bound ratio.
const double RATIO_GUARD = 1e-30;

double decision_scale(const QuadraticForm& f) {
    return std::max(f.max_abs(), 1e-300);
}

void require_finite(const QuadraticForm& f, const char* where) {
    for (double v : f.a)
        if (!std::isfinite(v))
            throw input_error(std::string(where) + ": non-finite form coefficient");
}

/// Uniform double in [0, 1) from the raw generator, bit-identical across
/// platforms (std::uniform_real_distribution is not).
double canonical_unit(std::mt19937& rng) {
    const std::uint64_t hi = rng() >> 5;    // 27 bits
    const std::uint64_t lo = rng() >> 6;    // 26 bits
    return (hi * 67108864.0 + lo) * (1.0 / 9007199254740992.0);
}

} // namespace

double QuadraticForm::max_abs() const {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
}

QuadraticForm QuadraticForm::symmetric_part() const {
    QuadraticForm s = *this;
    for (int al = 0; al < 4; ++al)
        for (int be = 0; be < 4; ++be)
            s.at(al, be) = 0.5 * ((*this)(al, be) + (*this)(be, al));
    return s;
}

QuadraticForm& QuadraticForm::operator+=(const QuadraticForm& o) {
    for (int k = 0; k < 16; ++k) a[k] += o.a[k];
    return *this;
}

QuadraticForm& QuadraticForm::operator*=(double s) {
    for (double& v : a) v *= s;
    return *this;
}

QuadraticForm QuadraticForm::metric_form(int j, int k) {
    QuadraticForm f = zero(j, k);
    f.at(0, 0) = -1.0;
    f.at(1, 1) = f.at(2, 2) = f.at(3, 3) = 1.0;
    return f;
}

QuadraticForm QuadraticForm::rotation_form(int al, int be, int j, int k) {
    if (al < 0 || al > 3 || be < 0 || be > 3 || al == be)
        throw input_error("rotation_form needs two distinct directions in 0..3");
    QuadraticForm f = zero(j, k);
    f.at(al, be) = 1.0;
    f.at(be, al) = -1.0;
    return f;
}

QuadraticForm QuadraticForm::time_squared(int j, int k) {
    QuadraticForm f = zero(j, k);
    f.at(0, 0) = 1.0;
    return f;
}

QuadraticForm QuadraticForm::zero(int j, int k) {
    QuadraticForm f;
    f.field_j = j;
    f.field_k = k;
    return f;
}

bool check_null_condition(const QuadraticForm& form, NullWitness* witness) {
    require_finite(form, "check_null_condition");
    const QuadraticForm s = form.symmetric_part();
    const double tol = ALGEBRA_TOL * decision_scale(form);

    // Null forms are exactly the multiples of the metric plus any antisymmetric
    // part, since xi^a xi^b kills the latter and g(xi, xi) = 0 on the cone.
    const double lam = (s(1, 1) + s(2, 2) + s(3, 3)) / 3.0;
    double defect = std::abs(s(0, 0) + lam);
    for (int i = 1; i < 4; ++i) {
        defect = std::max(defect, std::abs(s(i, i) - lam));
        defect = std::max(defect, std::abs(s(0, i)));
    }
    for (int i = 1; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            defect = std::max(defect, std::abs(s(i, j)));

    if (defect <= tol) return true;

    if (witness) {
        // Scan null covectors xi = (1, n) for the largest |A(xi, xi)|.  The
        // restriction to the cone is a degree-2 polynomial in n, so a modest
        // grid cannot miss a genuine violation.
        double best = -1.0;
        const int NT = 48, NP = 96;
        for (int it = 0; it < NT; ++it) {
            const double th = M_PI * (it + 0.5) / NT;
            for (int ip = 0; ip < NP; ++ip) {
                const double ph = 2.0 * M_PI * ip / NP;
                const std::array<double, 4> xi = {
                    1.0,
                    std::sin(th) * std::cos(ph),
                    std::sin(th) * std::sin(ph),
                    std::cos(th)};
                double val = 0.0;
                for (int al = 0; al < 4; ++al)
                    for (int be = 0; be < 4; ++be)
                        val += form(al, be) * xi[al] * xi[be];
                if (std::abs(val) > best) {
                    best = std::abs(val);
                    witness->xi = xi;
                    witness->value = val;
                }
            }
        }
    }
    return false;
}

double RadialNullFrameForm::max_abs() const {
    return std::max(std::max(std::abs(c_ll), std::abs(c_lb)),
                    std::max(std::abs(c_bl), std::abs(c_bb)));
}

bool RadialNullFrameForm::is_zero(double tol) const { return max_abs() <= tol; }

RadialNullFrameForm reduce_to_null_frame(const QuadraticForm& form) {
    require_finite(form, "reduce_to_null_frame");
    const double tol = ALGEBRA_TOL * decision_scale(form);

    // With both slots fed by the same field, only the symmetric part of the
    // form can contribute, so symmetrize before testing reducibility.
    QuadraticForm m = (form.field_j == form.field_k) ? form.symmetric_part() : form;

    // On radial arguments the gradient is (f_t, n_i f_r).  Time-space entries
    // multiply first-harmonic factors n_i and survive the restriction unless
    // they vanish, so their presence makes the product angle-dependent.
    for (int i = 1; i < 4; ++i) {
        if (std::abs(m(0, i)) > tol || std::abs(m(i, 0)) > tol)
            throw reduction_error(
                "time-space entry (0," + std::to_string(i) +
                ") leaves an odd angular residue on radial arguments");
    }

    // The spatial block meets n_i n_j, which kills its antisymmetric part and
    // turns the traceless symmetric part into a second harmonic.  Only an
    // isotropic symmetric spatial block restricts to a radial function.
    const double mu = (m(1, 1) + m(2, 2) + m(3, 3)) / 3.0;
    for (int i = 1; i < 4; ++i)
        for (int j = 1; j < 4; ++j) {
            const double sym = 0.5 * (m(i, j) + m(j, i));
            const double want = (i == j) ? mu : 0.0;
            if (std::abs(sym - want) > tol)
                throw reduction_error(
                    "anisotropic spatial entry (" + std::to_string(i) + "," +
                    std::to_string(j) + ") in the symmetric part");
        }

    // Q = A00 f_t g_t + mu f_r g_r in the reducible case; rewrite through
    // d_t = (L + Lbar)/2 and d_r = (L - Lbar)/2.
    const double a00 = m(0, 0);
    RadialNullFrameForm q;
    q.c_ll = q.c_bb = 0.25 * (a00 + mu);
    q.c_lb = q.c_bl = 0.25 * (a00 - mu);
    q.field_j = form.field_j;
    q.field_k = form.field_k;
    return q;
}

double nullform_pointwise_bound_check(const RadialNullFrameForm& q,
                                      int n_samples, std::uint32_t seed) {
    const double scale = std::max(q.max_abs(), 1.0);
    if (std::abs(q.c_ll) > ALGEBRA_TOL * scale || std::abs(q.c_bb) > ALGEBRA_TOL * scale)
        throw input_error("pointwise bound check requires c_ll = c_bb = 0");

    std::mt19937 rng(seed);
    double worst = 0.0;
    for (int s = 0; s < n_samples; ++s) {
        const double lphi = 4.0 * canonical_unit(rng) - 2.0;
        const double lbphi = 4.0 * canonical_unit(rng) - 2.0;
        const double lpsi = 4.0 * canonical_unit(rng) - 2.0;
        const double lbpsi = 4.0 * canonical_unit(rng) - 2.0;
        const double val = q.evaluate(lphi, lbphi, lpsi, lbpsi);
        const double den = std::abs(lphi) * std::abs(lbpsi) +
                           std::abs(lbphi) * std::abs(lpsi) + RATIO_GUARD;
        worst = std::max(worst, std::abs(val) / den);
    }
    return worst;
}

RadialNullFrameForm commutator_correction(const RadialNullFrameForm& q, VfName z) {
    RadialNullFrameForm c;
    c.field_j = q.field_j;
    c.field_k = q.field_k;
    switch (z) {
        case VfName::T:
            break;
        case VfName::S:
            // The scaling field adds one weight to each derivative slot, and
            // the form is quadratic in first derivatives, so the correction is
            // -2 Q regardless of the coefficients.
            c.c_ll = -2.0 * q.c_ll;
            c.c_lb = -2.0 * q.c_lb;
            c.c_bl = -2.0 * q.c_bl;
            c.c_bb = -2.0 * q.c_bb;
            break;
        case VfName::B:
            // The boost stretches L and shrinks Lbar, leaving the mixed
            // products invariant.  Null forms have no extreme coefficients, so
            // they commute with B up to the argument terms alone.
            c.c_ll = -2.0 * q.c_ll;
            c.c_bb = 2.0 * q.c_bb;
            break;
    }
    return c;
}

SystemCoupling::SystemCoupling(int n_fields, std::vector<CouplingTerm> terms)
    : n_fields_(n_fields), terms_(std::move(terms)) {
    if (n_fields_ < 1)
        throw config_error("coupling needs at least one field");
    reduced_.resize(static_cast<std::size_t>(n_fields_));
    for (const CouplingTerm& t : terms_) {
        if (t.target < 0 || t.target >= n_fields_)
            throw config_error("coupling target index out of range");
        if (t.form.field_j < 0 || t.form.field_j >= n_fields_ ||
            t.form.field_k < 0 || t.form.field_k >= n_fields_)
            throw config_error("coupling argument index out of range");
        require_finite(t.form, "coupling term");
        reduced_[static_cast<std::size_t>(t.target)].push_back(reduce_to_null_frame(t.form));
        if (!check_null_condition(t.form)) all_null_ = false;
    }
}

void SystemCoupling::source(const double* lphi, const double* lbphi, double* out) const {
    for (int i = 0; i < n_fields_; ++i) {
        double s = 0.0;
        for (const RadialNullFrameForm& q : reduced_[static_cast<std::size_t>(i)])
            s += q.evaluate(lphi[q.field_j], lbphi[q.field_j],
                            lphi[q.field_k], lbphi[q.field_k]);
        out[i] = s;
    }
}

std::string to_string(VfName z) { return std::string(1, static_cast<char>(z)); }

} // namespace nullpulse
