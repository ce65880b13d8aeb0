#pragma once

#include "foimc/types.hpp"

namespace foimc {

/// Filter response Theta(j omega) = 1 / (lambda (j omega)^beta + 1), with the
/// principal branch (j omega)^beta = omega^beta (cos(beta pi/2) + j sin(beta pi/2)).
Complex eval_filter(const FoFilterParams& params, double omega);

/// Open loop L(j omega) = e^{-j theta omega} / (lambda (j omega)^beta + 1 - e^{-j theta omega}).
/// The denominator is carried in split real/imaginary form,
///   (1 + lambda omega^beta cos(beta pi/2) - cos(theta omega))
///     + j (lambda omega^beta sin(beta pi/2) + sin(theta omega)),
/// so the margin equations derived from it share the exact same terms.
Complex eval_open_loop(const FoFilterParams& params, double theta, double omega);

/// Reference-to-output response of the exact-model loop; algebraically
/// L/(1+L), evaluated in the reduced form e^{-j theta omega} * Theta(j omega).
Complex eval_complementary(const FoFilterParams& params, double theta, double omega);

/// Sensitivity 1/(1+L), evaluated in the reduced form
/// (lambda (j omega)^beta + 1 - e^{-j theta omega}) / (lambda (j omega)^beta + 1);
/// complements eval_complementary to 1.
Complex eval_sensitivity(const FoFilterParams& params, double theta, double omega);

}  // namespace foimc
