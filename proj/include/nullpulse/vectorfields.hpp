#ifndef NULLPULSE_VECTORFIELDS_HPP
#define NULLPULSE_VECTORFIELDS_HPP

#include <vector>

#include "nullpulse/grid.hpp"
#include "nullpulse/null_forms.hpp"
#include "nullpulse/solver.hpp"

namespace nullpulse {

/// One scalar per grid node over the first valid_levels levels, used to carry
/// commuted quantities like S B phi around as plain arrays.
struct FieldArray {
    const DoubleNullGrid* grid = nullptr;
    int valid_levels = 0;
    std::vector<double> v;

    double at(int i, int j) const { return v[static_cast<std::size_t>(grid->node_index(i, j))]; }
    double& at(int i, int j) { return v[static_cast<std::size_t>(grid->node_index(i, j))]; }

    double interp(double u, double ub) const {
        return interp_on_levels(*grid, valid_levels, u, ub,
                                [this](int i, int j) { return at(i, j); });
    }
};

FieldArray make_array(const DoubleNullGrid& grid, int valid_levels);

/// phi values of one component of a computed sheet.
FieldArray phi_array(const SolutionSheet& sheet, int field);

/// d/dt + d/dr of a nodal array, differenced along the u = const columns with
/// second order stencils, one sided at column ends.
FieldArray l_of(const FieldArray& a);

/// d/dt - d/dr, differenced along the levels.
FieldArray lbar_of(const FieldArray& a);

/// Application of one commuting field.  In the null derivatives the three
/// fields are first order operators with polynomial coefficients,
///   T = (1/2) L + (1/2) Lbar,
///   S = ubar L + u Lbar,
///   B = ubar L - u Lbar,
/// so each application costs two differenced arrays and a pointwise fuse.
FieldArray apply_field(const FieldArray& a, VfName z);

/// Word applied innermost letter first, so word[0] is the outermost operator.
FieldArray apply_word(const SolutionSheet& sheet, int field,
                      const std::vector<VfName>& word);

/// All words over {T, S, B} of length exactly n, or of length <= n.
std::vector<std::vector<VfName>> words_of_length(int n);
std::vector<std::vector<VfName>> words_up_to(int n);

/// Translations in a word, the count that picks up a power of delta in the
/// weighted norms.
int word_translations(const std::vector<VfName>& word);

std::string word_name(const std::vector<VfName>& word);

/// Largest relative violation of the pointwise algebra
///   t S phi - r B phi = (t^2 - r^2) T phi,
///   t B phi - r S phi = (t^2 - r^2) (d_r phi)
/// over the computed nodes, with all five arrays built from the same
/// differenced L phi and Lbar phi values.  Both identities are exact in the
/// discrete algebra, so anything beyond roundoff flags a coefficient error.
double field_identity_residual(const SolutionSheet& sheet, int field);

} // namespace nullpulse

#endif
