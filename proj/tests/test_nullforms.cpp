#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "nullpulse/errors.hpp"
#include "nullpulse/null_forms.hpp"

using namespace nullpulse;

namespace {

std::vector<QuadraticForm> basis_forms() {
    std::vector<QuadraticForm> b;
    b.push_back(QuadraticForm::metric_form());
    for (int al = 0; al < 4; ++al)
        for (int be = al + 1; be < 4; ++be)
            b.push_back(QuadraticForm::rotation_form(al, be));
    return b;
}

double evaluate(const QuadraticForm& f, const std::array<double, 4>& xi) {
    double v = 0.0;
    for (int al = 0; al < 4; ++al)
        for (int be = 0; be < 4; ++be)
            v += f(al, be) * xi[al] * xi[be];
    return v;
}

/// A usable witness carries a nonzero null covector whose quadratic value
/// matches the reported one.
void check_witness(const QuadraticForm& f, const NullWitness& w) {
    const double space = w.xi[1] * w.xi[1] + w.xi[2] * w.xi[2] + w.xi[3] * w.xi[3];
    const double mag = w.xi[0] * w.xi[0] + space;
    CHECK(mag > 0.0);
    CHECK(std::abs(w.xi[0] * w.xi[0] - space) <= 1e-9 * mag);
    CHECK(std::abs(evaluate(f, w.xi) - w.value) <= 1e-9 * (1.0 + std::abs(w.value)));
    CHECK(std::abs(w.value) > 0.0);
}

} // namespace

TEST_CASE("basis forms all annihilate null covectors") {
    const auto basis = basis_forms();
    CHECK(basis.size() == 7);
    for (const QuadraticForm& f : basis) CHECK(check_null_condition(f));
}

TEST_CASE("metric form reduces to the pure cross terms") {
    const RadialNullFrameForm q = reduce_to_null_frame(QuadraticForm::metric_form());
    CHECK(q.c_ll == 0.0);
    CHECK(q.c_bb == 0.0);
    CHECK(q.c_lb == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(q.c_bl == doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("time-derivative square reduces to equal quarters and is not null") {
    const QuadraticForm f = QuadraticForm::time_squared();
    const RadialNullFrameForm q = reduce_to_null_frame(f);
    CHECK(q.c_ll == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(q.c_lb == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(q.c_bl == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(q.c_bb == doctest::Approx(0.25).epsilon(1e-14));

    NullWitness w;
    CHECK_FALSE(check_null_condition(f, &w));
    check_witness(f, w);
    // On xi = (1, n) the value is exactly the coefficient of dt dt.
    CHECK(std::abs(w.value) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("rotation forms vanish on radial arguments") {
    for (int al = 0; al < 4; ++al)
        for (int be = al + 1; be < 4; ++be) {
            const RadialNullFrameForm q =
                reduce_to_null_frame(QuadraticForm::rotation_form(al, be));
            CHECK(q.max_abs() == 0.0);
        }
}

TEST_CASE("seeded combinations stay null, tilted ones fail with a witness") {
    std::mt19937 rng(20260822u);
    const auto basis = basis_forms();
    for (int trial = 0; trial < 100; ++trial) {
        QuadraticForm combo = QuadraticForm::zero();
        for (const QuadraticForm& b : basis) {
            const double c =
                4.0 * (static_cast<double>(rng()) / 4294967296.0) - 2.0;
            combo += c * b;
        }
        CHECK(check_null_condition(combo));

        QuadraticForm tilted = combo;
        const double eps = (trial % 2 == 0) ? 1e-6 : 1e-3;
        tilted.at(0, 0) += eps;
        NullWitness w;
        CHECK_FALSE(check_null_condition(tilted, &w));
        check_witness(tilted, w);
    }
}

TEST_CASE("anisotropic and cross-field forms refuse to reduce") {
    QuadraticForm xsq = QuadraticForm::zero();
    xsq.at(1, 1) = 1.0;
    CHECK_THROWS_AS(reduce_to_null_frame(xsq), reduction_error);

    // With distinct argument fields the antisymmetric part survives, so a
    // time-space rotation leaves an angle-dependent product.
    CHECK_THROWS_AS(reduce_to_null_frame(QuadraticForm::rotation_form(0, 1, 0, 1)),
                    reduction_error);
}

TEST_CASE("non-finite coefficients are rejected") {
    QuadraticForm f = QuadraticForm::metric_form();
    f.at(2, 3) = std::nan("");
    CHECK_THROWS_AS(check_null_condition(f), input_error);
    CHECK_THROWS_AS(reduce_to_null_frame(f), input_error);
}

TEST_CASE("commuting field corrections on the reduced form") {
    const RadialNullFrameForm q = reduce_to_null_frame(QuadraticForm::metric_form());

    const RadialNullFrameForm ct = commutator_correction(q, VfName::T);
    CHECK(ct.max_abs() == 0.0);

    const RadialNullFrameForm cs = commutator_correction(q, VfName::S);
    CHECK(cs.c_lb == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cs.c_bl == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(cs.c_ll == 0.0);
    CHECK(cs.c_bb == 0.0);

    // The boost only touches the extreme coefficients, absent here.
    const RadialNullFrameForm cb = commutator_correction(q, VfName::B);
    CHECK(cb.max_abs() == 0.0);

    RadialNullFrameForm ex;
    ex.c_ll = 3.0;
    ex.c_bb = 5.0;
    const RadialNullFrameForm cex = commutator_correction(ex, VfName::B);
    CHECK(cex.c_ll == doctest::Approx(-6.0));
    CHECK(cex.c_bb == doctest::Approx(10.0));
    CHECK(cex.c_lb == 0.0);
    CHECK(cex.c_bl == 0.0);
}

TEST_CASE("sampled product bound for the reduced cross form") {
    const RadialNullFrameForm q = reduce_to_null_frame(QuadraticForm::metric_form());
    const double worst = nullform_pointwise_bound_check(q);
    CHECK(worst <= 0.5 * (1.0 + 1e-9));
    CHECK(worst > 0.4);

    const RadialNullFrameForm bad = reduce_to_null_frame(QuadraticForm::time_squared());
    CHECK_THROWS_AS(nullform_pointwise_bound_check(bad), input_error);
}

TEST_CASE("system coupling reduces terms and evaluates sources") {
    std::vector<CouplingTerm> terms;
    terms.push_back({0, QuadraticForm::metric_form(0, 0)});
    terms.push_back({1, QuadraticForm::metric_form(1, 1)});
    terms.push_back({0, QuadraticForm::metric_form(0, 1)});
    const SystemCoupling sys(2, terms);
    CHECK(sys.all_null());
    CHECK_FALSE(sys.empty());

    const double lphi[2] = {1.0, 2.0};
    const double lbphi[2] = {3.0, 4.0};
    double out[2] = {0.0, 0.0};
    sys.source(lphi, lbphi, out);
    // Diagonal metric terms give -(L phi Lbar psi + Lbar phi L psi)/2.
    CHECK(out[0] == doctest::Approx(-3.0 - 5.0).epsilon(1e-14));
    CHECK(out[1] == doctest::Approx(-8.0).epsilon(1e-14));

    const SystemCoupling none(3, {});
    CHECK(none.empty());
    CHECK(none.all_null());

    const SystemCoupling tsq(1, {{0, QuadraticForm::time_squared()}});
    CHECK_FALSE(tsq.all_null());

    CHECK_THROWS_AS(SystemCoupling(1, {{2, QuadraticForm::metric_form()}}),
                    config_error);
    CHECK_THROWS_AS(SystemCoupling(1, {{0, QuadraticForm::metric_form(0, 1)}}),
                    config_error);
}
