#include "foimc/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "foimc/errors.hpp"

namespace foimc {

namespace {

constexpr double kPi = std::numbers::pi;

void require_positive_omega(double omega) {
    if (!(omega > 0.0))
        throw DomainError("frequency must be strictly positive, got " + std::to_string(omega));
}

void require_positive_theta(double theta) {
    if (!(theta > 0.0))
        throw DomainError("dead time must be strictly positive, got " + std::to_string(theta));
}

}  // namespace

void validate(const ProcessModel& model) {
    if (!(model.tau > 0.0))
        throw SpecError("process time constant must be positive, got " + std::to_string(model.tau));
    if (!(model.theta > 0.0))
        throw SpecError("process dead time must be positive, got " + std::to_string(model.theta));
    if (!(model.k != 0.0) || std::isnan(model.k))
        throw SpecError("process gain must be nonzero");
}

void validate(const RobustnessSpec& spec) {
    if (spec.gain_margin == 1.0)
        throw SpecError("a gain margin of exactly 1 is unattainable: the crossover equations degenerate there");
    if (!(spec.gain_margin >= 2.0))
        throw SpecError("gain margin must be at least 2 (absolute ratio) for the phase crossover to stay real; got " +
                        std::to_string(spec.gain_margin));
    if (!(spec.phase_margin > 0.0 && spec.phase_margin < kPi))
        throw SpecError("phase margin must lie strictly inside (0, pi) rad; got " +
                        std::to_string(spec.phase_margin));
}

void validate(const FoFilterParams& params) {
    if (!(params.lambda > 0.0))
        throw SpecError("filter constant lambda must be positive, got " + std::to_string(params.lambda));
    if (!(params.beta > 0.0 && params.beta < 2.0))
        throw SpecError("filter order beta must lie strictly inside (0, 2), got " +
                        std::to_string(params.beta));
}

Complex eval_filter(const FoFilterParams& params, double omega) {
    validate(params);
    require_positive_omega(omega);
    const double mag = params.lambda * std::pow(omega, params.beta);
    const double half = params.beta * kPi / 2.0;
    return 1.0 / Complex{mag * std::cos(half) + 1.0, mag * std::sin(half)};
}

Complex eval_open_loop(const FoFilterParams& params, double theta, double omega) {
    validate(params);
    require_positive_theta(theta);
    require_positive_omega(omega);
    const double mag = params.lambda * std::pow(omega, params.beta);
    const double half = params.beta * kPi / 2.0;
    const double tw = theta * omega;
    const Complex den{1.0 + mag * std::cos(half) - std::cos(tw),
                      mag * std::sin(half) + std::sin(tw)};
    if (std::abs(den) < 1e-300)
        throw SingularityError("open-loop denominator vanished at omega = " + std::to_string(omega));
    return Complex{std::cos(tw), -std::sin(tw)} / den;
}

Complex eval_complementary(const FoFilterParams& params, double theta, double omega) {
    require_positive_theta(theta);
    const double tw = theta * omega;
    return Complex{std::cos(tw), -std::sin(tw)} * eval_filter(params, omega);
}

Complex eval_sensitivity(const FoFilterParams& params, double theta, double omega) {
    validate(params);
    require_positive_theta(theta);
    require_positive_omega(omega);
    const double mag = params.lambda * std::pow(omega, params.beta);
    const double half = params.beta * kPi / 2.0;
    const double tw = theta * omega;
    const Complex filter_den{mag * std::cos(half) + 1.0, mag * std::sin(half)};
    const Complex num{filter_den.real() - std::cos(tw), filter_den.imag() + std::sin(tw)};
    return num / filter_den;
}

}  // namespace foimc
