#include "pavsim/models.hpp"
#include "pavsim/parameters.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace pavsim;

namespace {

RunParameters reinforced(double beta, double lambda, double sigma_e = 0.0, double sigma_i = 0.0) {
    return {beta, lambda, 1, sigma_e - sigma_i, sigma_e, sigma_i};
}

RunParameters nonreinforced(double beta, double sigma_e = 0.0, double sigma_i = 0.0) {
    return {beta, 0.0, -1, sigma_e - sigma_i, sigma_e, sigma_i};
}

StimulusState fresh(double alpha) {
    StimulusState s;
    s.alpha = alpha;
    s.alpha0 = alpha;
    return s;
}

struct RandomInputs {
    std::mt19937_64 rng;
    std::uniform_real_distribution<double> unit{0.0, 1.0};

    explicit RandomInputs(std::uint64_t seed) : rng(seed) {}

    double u() { return unit(rng); }

    StimulusState state() {
        StimulusState s;
        s.V_E = 2.0 * u();
        s.V_I = 2.0 * u();
        s.V = s.V_E - s.V_I;
        s.alpha = 1.2 * u();
        s.alpha_mack = 1.2 * u();
        s.alpha_hall = 1.2 * u();
        s.salience = u();
        s.alpha0 = u();
        return s;
    }

    RunParameters params(const StimulusState& s) {
        const bool plus = u() < 0.5;
        const double lambda = plus ? 2.0 * u() : 0.0;
        const double se = s.V_E + 2.0 * u();
        const double si = s.V_I + 2.0 * u();
        return {0.01 + u(), lambda, plus ? 1 : -1, se - si, se, si};
    }

    StepConstants constants() { return {u(), 2.0 * u(), 2.0 * u(), u(), 1.0}; }
};

}  // namespace

TEST(RescorlaWagner, AcquisitionStep) {
    const auto s = rw_step(fresh(0.15), reinforced(0.5, 0.8));
    EXPECT_DOUBLE_EQ(s.V, 0.06);
    EXPECT_EQ(s.alpha, 0.15);
}

TEST(RescorlaWagner, NoChangeAtAsymptote) {
    StimulusState s = fresh(0.15);
    s.V = 0.8;
    EXPECT_EQ(rw_step(s, reinforced(0.5, 0.8, 0.8)).V, 0.8);
}

TEST(RescorlaWagner, ExtinctionStep) {
    StimulusState s = fresh(0.15);
    s.V = 0.5;
    EXPECT_NEAR(rw_step(s, nonreinforced(0.3, 0.5)).V - 0.5, -0.0225, 1e-15);
}

TEST(RescorlaWagner, ClosedFormAndMonotoneConvergence) {
    const double alpha = 0.3, beta = 0.7, lambda = 1.3;
    StimulusState s = fresh(alpha);
    double previous = 0.0;
    for (int n = 1; n <= 200; ++n) {
        s = rw_step(s, reinforced(beta, lambda, s.V));
        EXPECT_NEAR(s.V, lambda * (1.0 - std::pow(1.0 - alpha * beta, n)), 1e-12);
        if (n <= 50) EXPECT_GT(s.V, previous);
        EXPECT_GE(s.V, previous);
        EXPECT_LE(s.V, lambda);
        previous = s.V;
    }
}

TEST(PearceKayeHall, ExcitatoryIncrement) {
    StimulusState s = fresh(0.9);
    s.salience = 0.2;
    const auto out = pkh_step(s, reinforced(0.5, 1.0), {0.1, 0, 0, 0, 1});
    EXPECT_DOUBLE_EQ(out.V_E, 0.09);
    EXPECT_DOUBLE_EQ(out.alpha, 0.91);
    EXPECT_EQ(out.V, out.V_E - out.V_I);
}

TEST(PearceKayeHall, ZeroErrorWithoutUs) {
    StimulusState s = fresh(0.9);
    s.salience = 0.2;
    const auto out = pkh_step(s, nonreinforced(0.3), {0.1, 0, 0, 0, 1});
    EXPECT_EQ(out.V_E, 0.0);
    EXPECT_EQ(out.V_I, 0.0);
    EXPECT_DOUBLE_EQ(out.alpha, 0.9 * 0.9);
}

TEST(PearceKayeHall, InhibitoryBranchUsesErrorMagnitude) {
    StimulusState s = fresh(0.5);
    s.salience = 0.4;
    s.V_E = 0.6;
    s.V = 0.6;
    const auto out = pkh_step(s, nonreinforced(0.3, 0.6), {0.2, 0, 0, 0, 1});
    EXPECT_DOUBLE_EQ(out.V_I, 0.4 * 0.3 * 0.5 * 0.6);
    EXPECT_DOUBLE_EQ(out.alpha, 0.2 * 0.6 + 0.8 * 0.5);
}

TEST(PearceKayeHall, StrengthsNeverDecrease) {
    RandomInputs in(1);
    for (int i = 0; i < 20000; ++i) {
        const auto s = in.state();
        const auto out = pkh_step(s, in.params(s), in.constants());
        EXPECT_GE(out.V_E, s.V_E);
        EXPECT_GE(out.V_I, s.V_I);
        EXPECT_EQ(out.V, out.V_E - out.V_I);
    }
}

TEST(MackintoshExtended, SymmetricPredictorLeavesAlpha) {
    const auto out = me_step(fresh(0.5), reinforced(0.5, 1.0), {0, 0.8, 0.1, 0, 1});
    EXPECT_EQ(out.alpha, 0.5);
    EXPECT_DOUBLE_EQ(out.V_E, 0.5 * 0.5 * 1.0 * 1.0);
}

TEST(MackintoshExtended, BlockedCueLosesAttention) {
    // Novel B beside A with V_E = 0.7: B predicts worse than A does.
    const auto out = me_step(fresh(0.5), reinforced(0.5, 0.8, 0.7), {0, 0.25, 0.2, 0, 1});
    EXPECT_NEAR(out.alpha, 0.5 - 0.25 * (0.8 - 0.1), 1e-15);
}

TEST(MackintoshExtended, AlphaIsClamped) {
    StimulusState high = fresh(0.95);
    high.V_E = 0.8;
    high.V = 0.8;
    // The cue predicts better than the rest of the trial, so alpha overshoots 1.
    EXPECT_EQ(me_step(high, reinforced(0.5, 1.0, 0.8), {0, 2.0, 0.1, 0, 1}).alpha, 1.0);
    EXPECT_EQ(me_step(fresh(0.06), reinforced(0.5, 0.8, 0.7), {0, 0.5, 0.1, 0, 1}).alpha, kMackintoshAlphaMin);
}

TEST(MackintoshExtended, ZeroErrorChangesNothing) {
    StimulusState s = fresh(0.4);
    s.V_E = 0.5;
    s.V = 0.5;
    const auto out = me_step(s, reinforced(0.5, 1.0, 1.0), {0, 0.8, 0.1, 0, 1});
    EXPECT_EQ(out, s);
}

TEST(LePelleyHybrid, HallAssociabilityUpdate) {
    StimulusState s = fresh(0.9);
    s.alpha_mack = 0.9;
    s.alpha_hall = 0.9;
    const auto out = lph_step(s, reinforced(0.5, 1.0), {0.1, 0.8, 0.1, 0, 1});
    EXPECT_DOUBLE_EQ(out.alpha_hall, 0.91);
    EXPECT_DOUBLE_EQ(out.V_E, 0.9 * 0.9 * 0.5);
    EXPECT_DOUBLE_EQ(out.alpha, out.alpha_mack * out.alpha_hall);
}

TEST(LePelleyHybrid, HallAssociabilityFloor) {
    StimulusState s = fresh(0.9);
    s.alpha_mack = 0.9;
    s.alpha_hall = 0.9;
    const auto out = lph_step(s, reinforced(0.5, 0.3), {1.0, 0.8, 0.1, 0, 1});
    EXPECT_EQ(out.alpha_hall, kHallAlphaMin);
}

TEST(LePelleyHybrid, FullyPredictedUs) {
    StimulusState s = fresh(0.9);
    s.alpha_mack = 0.9;
    s.alpha_hall = 0.8;
    s.V_E = 1.0;
    s.V = 1.0;
    const auto out = lph_step(s, reinforced(0.5, 1.0, 1.0), {0.1, 0.8, 0.1, 0, 1});
    EXPECT_EQ(out.V_E, 1.0);
    EXPECT_EQ(out.V_I, 0.0);
    EXPECT_DOUBLE_EQ(out.alpha_hall, 0.9 * 0.8);
    EXPECT_EQ(out.alpha_mack, 0.9);
}

TEST(Clamps, HoldForRandomInputs) {
    RandomInputs in(2);
    for (int i = 0; i < 100000; ++i) {
        const auto s = in.state();
        const auto rp = in.params(s);
        const auto k = in.constants();
        const auto me = me_step(s, rp, k);
        ASSERT_GE(me.alpha, kMackintoshAlphaMin);
        ASSERT_LE(me.alpha, 1.0);
        ASSERT_EQ(me.V, me.V_E - me.V_I);
        const auto lph = lph_step(s, rp, k);
        ASSERT_GE(lph.alpha_mack, kMackintoshAlphaMin);
        ASSERT_LE(lph.alpha_mack, 1.0);
        ASSERT_GE(lph.alpha_hall, kHallAlphaMin);
        ASSERT_LE(lph.alpha_hall, 1.0);
        ASSERT_EQ(lph.V, lph.V_E - lph.V_I);
        const auto mlab = mlab_step(s, rp, k);
        ASSERT_GE(mlab.alpha, 0.0);
        ASSERT_LE(mlab.alpha, 1.0);
    }
}

TEST(Mlab, NovelCueOnlyDecays) {
    const auto out = mlab_step(fresh(0.5), reinforced(0.5, 1.0), {0, 0, 0, 0.1, 1});
    EXPECT_DOUBLE_EQ(out.alpha, 0.45);
    EXPECT_DOUBLE_EQ(out.V, 0.25);
}

TEST(Mlab, NonreinforcedBranch) {
    StimulusState s = fresh(0.5);
    s.V = 0.4;
    const auto out = mlab_step(s, nonreinforced(0.3, 0.4), {0, 0, 0, 0.0, 1});
    EXPECT_DOUBLE_EQ(out.alpha, 0.58);
}

TEST(Mlab, DecayResumesAtAsymptote) {
    StimulusState s = fresh(0.5);
    s.V = 1.0;
    s.alpha = 0.7;
    EXPECT_DOUBLE_EQ(mlab_step(s, reinforced(0.5, 1.0, 1.0), {0, 0, 0, 0.2, 1}).alpha, 0.7 * 0.8);
}

TEST(Mlab, DegeneratesToRescorlaWagner) {
    RandomInputs in(3);
    for (int i = 0; i < 20000; ++i) {
        StimulusState s = in.state();
        s.alpha = in.u();
        const auto rp = in.params(s);
        const auto mlab = mlab_step(s, rp, {0, 0, 0, 0.0, 0.0});
        const auto rw = rw_step(s, rp);
        ASSERT_EQ(mlab.V, rw.V);
        ASSERT_EQ(mlab.alpha, rw.alpha);
    }
}

TEST(ZeroError, EveryModelKeepsStrengthsWithoutUs) {
    StimulusState s = fresh(0.5);
    s.alpha_mack = 0.5;
    s.alpha_hall = 0.7;
    s.salience = 0.3;
    const RunParameters rp = nonreinforced(0.3);
    for (ModelKind kind : all_models()) {
        const auto out = step(kind, s, rp, {0.1, 0.8, 0.1, 0.05, 1});
        EXPECT_EQ(out.V, 0.0) << model_name(kind);
        EXPECT_EQ(out.V_E, 0.0) << model_name(kind);
        EXPECT_EQ(out.V_I, 0.0) << model_name(kind);
    }
}

TEST(ZeroError, ErrorDrivenModelsKeepStrengthsAtAsymptote) {
    StimulusState s = fresh(0.5);
    s.alpha_mack = 0.5;
    s.alpha_hall = 0.7;
    s.V_E = 0.8;
    s.V = 0.8;
    const RunParameters rp = reinforced(0.5, 0.8, 0.8);
    for (ModelKind kind : {ModelKind::RescorlaWagner, ModelKind::MackintoshExtended, ModelKind::LePelleyHybrid,
                           ModelKind::Mlab}) {
        const auto out = step(kind, s, rp, {0.1, 0.8, 0.1, 0.05, 1});
        EXPECT_EQ(out.V, 0.8) << model_name(kind);
        EXPECT_EQ(out.V_E, 0.8) << model_name(kind);
    }
}

TEST(TrackedFields, PerModel) {
    EXPECT_EQ(tracked_fields(ModelKind::RescorlaWagner), FieldV | FieldAlpha);
    EXPECT_EQ(tracked_fields(ModelKind::Mlab), FieldV | FieldAlpha);
    EXPECT_TRUE(tracked_fields(ModelKind::PearceKayeHall) & FieldVE);
    EXPECT_FALSE(tracked_fields(ModelKind::MackintoshExtended) & FieldAlphaMack);
    EXPECT_TRUE(tracked_fields(ModelKind::LePelleyHybrid) & FieldAlphaHall);
}
