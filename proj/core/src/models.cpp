#include "pavsim/models.hpp"

#include <algorithm>
#include <cmath>

namespace pavsim {

StepConstants step_constants(const ModelParameters& params) noexcept {
    return {params.gamma, params.theta_e, params.theta_i, params.decay, params.mlab_alpha0_gain};
}

StimulusState rw_step(const StimulusState& s, const RunParameters& rp) noexcept {
    StimulusState out = s;
    out.V = s.V + s.alpha * rp.beta * (rp.lambda - rp.sigma);
    return out;
}

StimulusState pkh_step(const StimulusState& s, const RunParameters& rp, const StepConstants& k) noexcept {
    StimulusState out = s;
    const double rho = rp.lambda - (rp.sigma_E - rp.sigma_I);
    if (rho >= 0.0) {
        out.V_E = s.V_E + s.salience * rp.beta * s.alpha * rp.lambda;
    } else {
        out.V_I = s.V_I + s.salience * rp.beta * s.alpha * std::abs(rho);
    }
    out.alpha = k.gamma * std::abs(rho) + (1.0 - k.gamma) * s.alpha;
    out.V = out.V_E - out.V_I;
    return out;
}

namespace {

// Change in Mackintosh attention: how much worse this stimulus predicts the
// outcome than the other stimuli on the trial, weighted by theta.
double mackintosh_delta(const StimulusState& s, const RunParameters& rp, double rho, const StepConstants& k) {
    const double other_E = rp.sigma_E - s.V_E;
    const double other_I = rp.sigma_I - s.V_I;
    if (rho > 0.0) {
        return -k.theta_e * (std::abs(rp.lambda - s.V_E + s.V_I) - std::abs(rp.lambda - other_E + other_I));
    }
    if (rho < 0.0) {
        const double target = std::abs(rho);
        return -k.theta_i * (std::abs(target - s.V_I + s.V_E) - std::abs(target - other_I + other_E));
    }
    return 0.0;
}

}  // namespace

StimulusState me_step(const StimulusState& s, const RunParameters& rp, const StepConstants& k) noexcept {
    StimulusState out = s;
    const double rho = rp.lambda - (rp.sigma_E - rp.sigma_I);
    if (rho > 0.0) {
        out.V_E = s.V_E + s.alpha * rp.beta * (1.0 - s.V_E + s.V_I) * std::abs(rho);
    } else if (rho < 0.0) {
        out.V_I = s.V_I + s.alpha * rp.beta * (1.0 - s.V_I + s.V_E) * std::abs(rho);
    }
    out.alpha = std::clamp(s.alpha + mackintosh_delta(s, rp, rho, k), kMackintoshAlphaMin, 1.0);
    out.V = out.V_E - out.V_I;
    return out;
}

StimulusState lph_step(const StimulusState& s, const RunParameters& rp, const StepConstants& k) noexcept {
    StimulusState out = s;
    const double rho = rp.lambda - (rp.sigma_E - rp.sigma_I);
    const double rate = s.alpha_mack * s.alpha_hall;
    if (rho >= 0.0) {
        out.V_E = s.V_E + rate * rp.beta * (1.0 - s.V_E + s.V_I) * std::abs(rho);
    } else {
        out.V_I = s.V_I + rate * rp.beta * (1.0 - s.V_I + s.V_E) * std::abs(rho);
    }
    out.alpha_mack =
        std::clamp(s.alpha_mack + s.alpha_hall * mackintosh_delta(s, rp, rho, k), kMackintoshAlphaMin, 1.0);
    out.alpha_hall = std::clamp(k.gamma * std::abs(rho) + (1.0 - k.gamma) * s.alpha_hall, kHallAlphaMin, 1.0);
    out.alpha = out.alpha_mack * out.alpha_hall;
    out.V = out.V_E - out.V_I;
    return out;
}

StimulusState mlab_step(const StimulusState& s, const RunParameters& rp, const StepConstants& k) noexcept {
    StimulusState out = s;
    const double error = rp.lambda - rp.sigma;
    out.V = s.V + s.alpha * rp.beta * error;
    const double pull = k.alpha0_gain * s.alpha0 * s.V * error;
    const double next = rp.lambda > 0.0 ? s.alpha * (1.0 - k.decay) + pull : s.alpha * (1.0 - k.decay) - pull;
    out.alpha = std::clamp(next, 0.0, 1.0);
    return out;
}

StimulusState step(ModelKind kind, const StimulusState& s, const RunParameters& rp, const StepConstants& k) noexcept {
    switch (kind) {
        case ModelKind::RescorlaWagner: return rw_step(s, rp);
        case ModelKind::PearceKayeHall: return pkh_step(s, rp, k);
        case ModelKind::MackintoshExtended: return me_step(s, rp, k);
        case ModelKind::LePelleyHybrid: return lph_step(s, rp, k);
        case ModelKind::Mlab: return mlab_step(s, rp, k);
    }
    return s;
}

FieldMask tracked_fields(ModelKind kind) noexcept {
    switch (kind) {
        case ModelKind::RescorlaWagner:
        case ModelKind::Mlab: return FieldV | FieldAlpha;
        case ModelKind::PearceKayeHall:
        case ModelKind::MackintoshExtended: return FieldV | FieldVE | FieldVI | FieldAlpha;
        case ModelKind::LePelleyHybrid:
            return FieldV | FieldVE | FieldVI | FieldAlpha | FieldAlphaMack | FieldAlphaHall;
    }
    return FieldV;
}

}  // namespace pavsim
