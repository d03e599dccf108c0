#include <doctest.h>

#include <cmath>
#include <functional>

#include "nullpulse/errors.hpp"
#include "nullpulse/null_forms.hpp"
#include "nullpulse/pulse_data.hpp"

using namespace nullpulse;

namespace {

const double PI = 3.14159265358979323846;

/// Composite Simpson rule, fine enough here to serve as an independent
/// reference for the library quadratures.
double simpson(const std::function<double(double)>& f, double a, double b, int n) {
    if (n % 2 == 1) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int k = 1; k < n; ++k) s += f(a + k * h) * (k % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}

double fd1(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

} // namespace

TEST_CASE("bump profile values and normalization") {
    const PulseProfile p;
    CHECK(p.value(0.5) == doctest::Approx(1.0).epsilon(1e-14));
    // C s^10 (1-s)^10 with C = 2^20 gives 3^10 / 2^20 at s = 1/4.
    CHECK(p.value(0.25) == doctest::Approx(59049.0 / 1048576.0).epsilon(1e-14));
    CHECK(p.value(0.0) == 0.0);
    CHECK(p.value(1.0) == 0.0);
    CHECK(p.value(-0.1) == 0.0);
    CHECK(p.value(1.1) == 0.0);
    CHECK(p.norm_const() == doctest::Approx(1048576.0).epsilon(1e-14));
}

TEST_CASE("bump derivatives match finite differences") {
    const PulseProfile p;
    for (double s : {0.15, 0.3, 0.62, 0.9}) {
        for (int k = 1; k <= 3; ++k) {
            auto fk = [&](double x) { return p.derivative(x, k - 1); };
            const double ref = fd1(fk, s, 1e-6);
            CHECK(p.derivative(s, k) == doctest::Approx(ref).epsilon(1e-5));
        }
    }
}

TEST_CASE("bump antiderivative is consistent with quadrature") {
    const PulseProfile p;
    const double got = p.antiderivative(0.7) - p.antiderivative(0.2);
    const double ref = simpson([&](double s) { return p.value(s); }, 0.2, 0.7, 4000);
    CHECK(got == doctest::Approx(ref).epsilon(1e-10));

    // Total integral of C s^10 (1-s)^10 is C (10!)^2 / 21!.
    const double total = 1048576.0 * 1.316818944e13 / 51090942171709440000.0;
    CHECK(p.antiderivative(1.0) == doctest::Approx(total).epsilon(1e-12));
    CHECK(p.antiderivative(2.0) == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("profile validation") {
    CHECK_THROWS_AS(PulseProfile("gaussian", {}), config_error);
    CHECK_THROWS_AS(PulseProfile("polynomial_bump", {10.0}), config_error);
    CHECK_THROWS_AS(PulseProfile("polynomial_bump", {10.5, 10.0}), config_error);
    CHECK_THROWS_AS(PulseProfile("polynomial_bump", {4.0, 4.0}), config_error);
}

TEST_CASE("pulse data support and scaling") {
    const double delta = 0.05, amp = 1.3;
    const ShortPulseData d = ShortPulseData::make(delta, amp);
    CHECK(d.r_inner() == doctest::Approx(1.0 - 2.0 * delta).epsilon(1e-15));
    CHECK(d.phi0(1.0 - delta) == doctest::Approx(amp * std::sqrt(delta)).epsilon(1e-14));
    CHECK(d.phi0(d.r_inner() - 1e-9) == 0.0);
    CHECK(d.phi0(1.0 + 1e-9) == 0.0);
    CHECK(d.phi0(0.2) == 0.0);

    for (double r : {0.92, 0.955, 0.98}) {
        auto f = [&](double x) { return d.phi0(x); };
        CHECK(d.phi0_deriv(r, 1) == doctest::Approx(fd1(f, r, 1e-7)).epsilon(1e-5));
        CHECK(d.phi1(r) == -d.phi0_deriv(r, 1));
    }

    CHECK_THROWS_AS(ShortPulseData::make(0.5, 1.0), config_error);
    CHECK_THROWS_AS(ShortPulseData::make(0.05, -1.0), config_error);
    CHECK_THROWS_AS(ShortPulseData::make(0.05, 1.0, PulseProfile(), 0), config_error);
}

TEST_CASE("classical energy against an independent quadrature") {
    const ShortPulseData d = ShortPulseData::make(0.05, 1.0);
    const double got = initial_classical_energy(d, 0, d.delta / 32.0);
    const double ref = simpson(
        [&](double r) {
            const double g = d.phi0_deriv(r, 1);
            const double v = d.phi1(r);
            return 4.0 * PI * r * r * (g * g + v * v);
        },
        d.r_inner(), 1.0, 8000);
    CHECK(got == doctest::Approx(ref).epsilon(1e-7));

    CHECK_THROWS_AS(initial_classical_energy(d, 0, d.delta / 8.0), resolution_error);
    CHECK_THROWS_AS(initial_classical_energy(d, 3, d.delta / 32.0), config_error);
}

TEST_CASE("classical energy steepens by two delta powers per order") {
    const ShortPulseData wide = ShortPulseData::make(0.05, 1.0);
    const ShortPulseData narrow = ShortPulseData::make(0.025, 1.0);
    const double r1 = initial_classical_energy(narrow, 1, narrow.delta / 32.0) /
                      initial_classical_energy(wide, 1, wide.delta / 32.0);
    CHECK(r1 > 3.0);
    CHECK(r1 < 5.5);
    const double r2 = initial_classical_energy(narrow, 2, narrow.delta / 32.0) /
                      initial_classical_energy(wide, 2, wide.delta / 32.0);
    CHECK(r2 > 12.0);
    CHECK(r2 < 22.0);
}

TEST_CASE("derivative table matches the data and its closure") {
    const ShortPulseData d = ShortPulseData::make(0.05, 1.0);
    const SystemCoupling none(1, {});
    const double r = 0.94;
    const TaylorTable tt(d, none, r);
    const TaylorTable::Table& g = tt.field(0);

    CHECK(g.at(0, 0) == doctest::Approx(d.phi0(r)).epsilon(1e-14));
    CHECK(g.at(0, 1) == doctest::Approx(d.phi0_deriv(r, 1)).epsilon(1e-14));
    CHECK(g.at(1, 0) == doctest::Approx(d.phi1(r)).epsilon(1e-14));
    CHECK(l_value(g) == 0.0);
    CHECK(lbar_value(g) == doctest::Approx(-2.0 * d.phi0_deriv(r, 1)).epsilon(1e-13));

    // Source-free second time row comes from the spatial part alone.
    const double want = g.at(0, 2) + 2.0 * g.at(0, 1) / r;
    CHECK(g.at(2, 0) == doctest::Approx(want).epsilon(1e-12));

    // A pure time-derivative source shifts that row by -(d_t phi)^2.
    const SystemCoupling tsq(1, {{0, QuadraticForm::time_squared()}});
    const TaylorTable ts(d, tsq, r);
    const double shifted = g.at(2, 0) - g.at(1, 0) * g.at(1, 0);
    CHECK(ts.field(0).at(2, 0) == doctest::Approx(shifted).epsilon(1e-12));
}

TEST_CASE("vector fields act on the derivative table") {
    const ShortPulseData d = ShortPulseData::make(0.05, 1.0);
    const SystemCoupling none(1, {});
    const double r = 0.93;
    const TaylorTable tt(d, none, r);
    const TaylorTable::Table& g = tt.field(0);

    const TaylorTable::Table gt = apply_vf(g, VfName::T);
    CHECK(gt.order == g.order - 1);
    CHECK(gt.at(0, 0) == doctest::Approx(g.at(1, 0)).epsilon(1e-14));
    CHECK(gt.at(0, 1) == doctest::Approx(g.at(1, 1)).epsilon(1e-14));
    CHECK(gt.at(2, 0) == doctest::Approx(g.at(3, 0)).epsilon(1e-13));

    const TaylorTable::Table gs = apply_vf(g, VfName::S);
    CHECK(gs.at(0, 0) ==
          doctest::Approx(g.t * g.at(1, 0) + g.r * g.at(0, 1)).epsilon(1e-13));
    CHECK(gs.at(1, 0) ==
          doctest::Approx(g.at(1, 0) + g.t * g.at(2, 0) + g.r * g.at(1, 1)).epsilon(1e-13));

    const TaylorTable::Table gb = apply_vf(g, VfName::B);
    CHECK(gb.at(0, 0) ==
          doctest::Approx(g.r * g.at(1, 0) + g.t * g.at(0, 1)).epsilon(1e-13));
}

TEST_CASE("weighted initial norm assembles its rows") {
    const ShortPulseData d = ShortPulseData::make(0.05, 1.0);
    const SystemCoupling q0(1, {{0, QuadraticForm::metric_form()}});
    const InitialNormBreakdown b = initial_weighted_norm_detail(d, q0, 2, 0.9);

    CHECK(b.rows.size() == 13);
    double total = 0.0;
    for (const InitialNormRow& row : b.rows) {
        CHECK(row.l2_lbar >= 0.0);
        CHECK(row.l2_l >= 0.0);
        total += std::pow(d.delta, row.n_bad) * row.l2_lbar +
                 std::pow(d.delta, row.n_bad - 1) * row.l2_l;
    }
    CHECK(b.total == doctest::Approx(total).epsilon(1e-12));
    CHECK(b.total == doctest::Approx(initial_weighted_norm(d, q0, 2, 0.9)).epsilon(1e-14));

    CHECK_THROWS_AS(initial_weighted_norm(d, q0, 4, 0.9), config_error);

    ShortPulseData quiet = d;
    quiet.amplitude = 0.0;
    CHECK(initial_weighted_norm(quiet, q0, 2, 0.9) == 0.0);
}

TEST_CASE("weighted initial norm is uniform across pulse widths") {
    const SystemCoupling q0(1, {{0, QuadraticForm::metric_form()}});
    const double wide = initial_weighted_norm(ShortPulseData::make(0.1, 1.0), q0, 1, 0.9);
    const double narrow =
        initial_weighted_norm(ShortPulseData::make(0.025, 1.0), q0, 1, 0.9);
    CHECK(narrow / wide > 0.25);
    CHECK(narrow / wide < 4.0);
}
