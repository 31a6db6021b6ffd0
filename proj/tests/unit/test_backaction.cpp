#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mechtomo/backaction.hpp"
#include "support.hpp"

namespace mechtomo::backaction {
namespace {

using fock::QuantumState;

constexpr double kG = 830.0;   // |mu| = g tau = 4.15 at tau = 5 ms
constexpr double kTau = 5e-3;

TEST(LargeIOperator, Completeness) {
  const std::size_t d = 160;
  const RamanSetting raman{400.0, 0.3};
  const CMatrix mg = large_i_operator(d, Outcome::ground, kG, kTau, raman);
  const CMatrix me = large_i_operator(d, Outcome::excited, kG, kTau, raman);
  const CMatrix sum = mg.adjoint() * mg + me.adjoint() * me;
  EXPECT_LE((sum - CMatrix::Identity(d, d)).topLeftCorner(60, 60).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(ConditionalUpdate, TrivialProbes) {
  std::mt19937_64 rng(51);
  const QuantumState psi = testing::random_pure(32, 6, rng);
  for (UpdateMode mode : {UpdateMode::large_i, UpdateMode::classical_exact}) {
    const UpdateResult no_coupling = conditional_update(psi, Outcome::ground, 0.0, kTau, {}, mode);
    EXPECT_NEAR(no_coupling.probability, 1.0, 1e-12);
    EXPECT_GE(std::abs(psi.amplitudes().dot(no_coupling.state.amplitudes())), 1.0 - 1e-12);
    const UpdateResult no_time = conditional_update(psi, Outcome::ground, kG, 0.0, {}, mode);
    EXPECT_NEAR(no_time.probability, 1.0, 1e-12);
    EXPECT_GE(std::abs(psi.amplitudes().dot(no_time.state.amplitudes())), 1.0 - 1e-12);
  }
  EXPECT_CONTRACT(conditional_update(psi, Outcome::excited, kG, 0.0, {}, UpdateMode::large_i),
                  ErrorKind::improbable_outcome);
}

TEST(ConditionalUpdate, VacuumSplitsIntoTwoCoherentComponents) {
  const std::size_t d = 64;
  const RamanSetting raman{400.0, 0.0};
  const UpdateResult r = conditional_update(fock::make_state(d, fock::Fock{0}), Outcome::ground, kG, kTau, raman,
                                            UpdateMode::large_i);
  const cplx half_mu = 0.5 * I_unit * kG * kTau;
  const double theta = 2.0 * kG * kTau * 20.0;
  CVector expect = std::polar(1.0, theta / 2) * fock::coherent_amplitudes(d, half_mu) +
                   std::polar(1.0, -theta / 2) * fock::coherent_amplitudes(d, -half_mu);
  expect /= expect.norm();
  EXPECT_GE(std::abs(expect.dot(r.state.amplitudes())), 1.0 - 1e-10);
  EXPECT_NEAR(r.purity, 1.0, 1e-12);
  // P_g = 1/2 + 1/2 cos(theta) e^{-|mu|^2/2}
  EXPECT_NEAR(r.probability, 0.5 + 0.5 * std::cos(theta) * std::exp(-0.5 * 4.15 * 4.15), 1e-10);
}

TEST(ConditionalUpdate, ClassicalDriveOracleAgreesAtLargeI) {
  // the c-number drive differs from the large-I map at second order; the gap closes with I
  const std::size_t d = 24;
  const QuantumState vac = fock::make_state(d, fock::Fock{0});
  const double tau = 1.0 / kG;
  auto gap = [&](double intensity) {
    const RamanSetting raman{intensity, 0.0};
    const auto li = conditional_update(vac, Outcome::ground, kG, tau, raman, UpdateMode::large_i);
    const auto cl = conditional_update(vac, Outcome::ground, kG, tau, raman, UpdateMode::classical_exact);
    return std::pair{std::abs(li.probability - cl.probability), 1.0 - fock::fidelity(li.state, cl.state)};
  };
  const auto [p400, f400] = gap(400.0);
  const auto [p1600, f1600] = gap(1600.0);
  EXPECT_LT(p1600, p400);
  EXPECT_LT(f1600, f400);
  EXPECT_LT(p1600, 2e-3);
  EXPECT_LT(f1600, 1e-2);
}

TEST(ConditionalUpdate, ExactModeIsMixed) {
  const std::size_t d = 16;
  const QuantumState vac = fock::make_state(d, fock::Fock{0});
  const RamanSetting raman{25.0, 0.0};
  const auto ex = conditional_update(vac, Outcome::ground, kG, 1.5 / kG, raman, UpdateMode::exact);
  EXPECT_FALSE(ex.state.is_pure());
  EXPECT_NEAR(ex.state.trace(), 1.0, 1e-10);
  EXPECT_LT(ex.purity, 1.0 - 1e-3);
  const auto exe = conditional_update(vac, Outcome::excited, kG, 1.5 / kG, raman, UpdateMode::exact);
  EXPECT_NEAR(ex.probability + exe.probability, 1.0, 1e-9);
}

TEST(ConditionalUpdate, Validation) {
  const QuantumState th = fock::make_state(8, fock::Thermal{0.2});
  EXPECT_CONTRACT(conditional_update(th, Outcome::ground, kG, kTau, {}, UpdateMode::large_i), ErrorKind::invalid_state);
  const QuantumState vac = fock::make_state(8, fock::Fock{0});
  EXPECT_CONTRACT(conditional_update(vac, Outcome::ground, kG, kTau, {-1.0, 0.0}, UpdateMode::large_i),
                  ErrorKind::invalid_intensity);
}

TEST(RunSequence, ZeroSteps) {
  const QuantumState vac = fock::make_state(16, fock::Fock{0});
  const TrajectoryLog log = run_sequence(vac, 0, {}, kG);
  EXPECT_EQ(log.snapshots.size(), 1u);
  EXPECT_TRUE(log.steps.empty());
  EXPECT_EQ(log.joint_probability, 1.0);
  EXPECT_CONTRACT(run_sequence(vac, 2, {ScheduleEntry{}}, kG), ErrorKind::contract);
}

TEST(RunSequence, GroundConditionedSplitting) {
  const std::size_t steps = 4;
  const QuantumState vac = fock::make_state(160, fock::Fock{0});
  const std::vector<ScheduleEntry> schedule(steps, ScheduleEntry{kTau, {400.0, 0.0}});
  const TrajectoryLog log = run_sequence(vac, steps, schedule, kG, {}, "fock(0)");
  ASSERT_EQ(log.snapshots.size(), steps + 1);
  double joint = 1.0;
  for (const auto& s : log.steps) {
    EXPECT_EQ(s.outcome, Outcome::ground);
    EXPECT_NEAR(s.p_ground + s.p_excited, 1.0, 1e-10);
    joint *= s.probability;
  }
  EXPECT_NEAR(log.joint_probability, joint, 1e-15);
  for (const auto& snap : log.snapshots) EXPECT_NEAR(snap.amplitudes().norm(), 1.0, 1e-10);
  for (double p : log.purity) EXPECT_NEAR(p, 1.0, 1e-9);

  SnapshotSpec spec;
  spec.x = phase::Axis::linspace(-4.0, 4.0, 81);
  spec.p = phase::Axis::linspace(-14.0, 14.0, 281);
  const auto grids = snapshots(log, spec);
  const auto rows = disturbance_report(log, grids, spec.direction);
  ASSERT_EQ(rows.size(), steps + 1);
  EXPECT_NEAR(rows[0].fidelity, 1.0, 1e-15);
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GT(rows[i].spread, rows[i - 1].spread) << i;
  for (const auto& row : rows) {
    EXPECT_NEAR(row.integral, 1.0, 2e-3) << row.step;
    EXPECT_NEAR(row.purity, 1.0, 1e-9);
  }
  // overlap oracle for step 1
  EXPECT_NEAR(rows[1].fidelity, std::norm(log.snapshots[1].amplitudes()(0)), 1e-14);
}

TEST(RunSequence, SampledOutcomesReproducible) {
  const QuantumState vac = fock::make_state(64, fock::Fock{0});
  const std::vector<ScheduleEntry> schedule(6, ScheduleEntry{2e-3, {400.0, 0.0}});
  SequencePolicy policy{SequencePolicy::Kind::sample_outcomes, 99};
  const TrajectoryLog a = run_sequence(vac, 6, schedule, kG, policy);
  const TrajectoryLog b = run_sequence(vac, 6, schedule, kG, policy);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(a.steps[i].outcome, b.steps[i].outcome);
    EXPECT_EQ(a.steps[i].probability, b.steps[i].probability);
  }
  EXPECT_EQ(a.joint_probability, b.joint_probability);
}

TEST(RunSequence, FreeEvolutionHook) {
  const QuantumState vac = fock::make_state(32, fock::Fock{0});
  const std::vector<ScheduleEntry> schedule(2, ScheduleEntry{1e-3, {400.0, 0.0}});
  std::size_t calls = 0;
  const FreeEvolution hook = [&](const QuantumState& s, std::size_t) {
    ++calls;
    return s;
  };
  run_sequence(vac, 2, schedule, kG, {}, "", hook);
  EXPECT_EQ(calls, 2u);
}

TEST(DisturbanceReport, Errors) {
  TrajectoryLog empty;
  EXPECT_CONTRACT(disturbance_report(empty, {}, 0.0), ErrorKind::contract);
}

}  // namespace
}  // namespace mechtomo::backaction
