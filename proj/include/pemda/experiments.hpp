#pragma once

#include <functional>
#include <vector>

#include "pemda/integrator.hpp"
#include "pemda/interpolant.hpp"
#include "pemda/records.hpp"

namespace pemda {

/// States of an external trajectory indexed by step number (time n * dt).
/// A reference returned by at() may be invalidated by a later call for a
/// larger index; fetch the later state first when two are needed.
class StateSource {
 public:
  virtual ~StateSource() = default;
  virtual const PemState& at(std::size_t n) = 0;
  /// Observation at the stage of the bootstrap step (time dt): the source's own
  /// first-step predictor when it has one, otherwise at(1).
  virtual const PemState& bootstrap_stage() { return at(1); }
};

struct Trajectory {
  PemParams params;
  IntegratorConfig cfg;
  // States at steps 0, stride, 2 * stride, ...
  std::vector<PemState> states;
  // One record for the initial state and one per step.
  std::vector<RunRecord> records;
  // Predictor of the first step (reference runs only).
  std::optional<PemState> stage;
};

/// Serves a stored trajectory; requires checkpoint_stride == 1.
class StoredSource : public StateSource {
 public:
  explicit StoredSource(const Trajectory& traj);
  const PemState& at(std::size_t n) override;
  const PemState& bootstrap_stage() override;

 private:
  const Trajectory& traj_;
};

/// Integrates the reference system on demand, keeping only the two newest
/// states. Indices may only move forward (at most one step back).
class LockstepReference : public StateSource {
 public:
  LockstepReference(PemState init, PemParams params, IntegratorConfig cfg);
  const PemState& at(std::size_t n) override;
  const PemState& bootstrap_stage() override;

 private:
  Integrator integ_;
  std::optional<PemState> stage_;
};

struct RunHooks {
  // Called for every record as soon as it exists.
  std::function<void(const RunRecord&)> on_record;
};

/// Record of a state after a step (or the initial state when info is null).
RunRecord make_record(const PemState& s, double dt, const StepInfo* info, const PemState* reference);

/// Unforced reference run.
Trajectory run_reference(const PemState& init, const PemParams& params, const IntegratorConfig& cfg,
                         const RunHooks& hooks = {});

/// Nudged run observing `reference` at every step; records carry err_l2.
Trajectory run_cda(StateSource& reference, const PemState& init_guess, const PemParams& params,
                   const Interpolant& interp, const IntegratorConfig& cfg, const RunHooks& hooks = {});

struct ConvergenceReport {
  std::vector<double> mus;
  // e_n = max over checkpoints of ||u_n - u_s|| + ||b_n - b_s||, with (u_n, b_n)
  // the difference quotient at mu_n and (u_s, b_s) the sensitivity solution.
  std::vector<double> errors;
  // errors[n] / errors[n + 1].
  std::vector<double> ratios;
  // Central-difference check; zero eps means it was not run.
  double central_eps = 0.0;
  double central_error = 0.0;
  // max over checkpoints of ||u_s|| + ||b_s||.
  double sensitivity_size = 0.0;
};

/// Sensitivity study around params.mu (with kappa tied to mu): the reference
/// starts from `reference_init` at params, every assimilation run starts from
/// `guess`, and all runs share the same observations.
ConvergenceReport run_sensitivity_study(const PemState& reference_init, const PemState& guess, const PemParams& params,
                                        const Interpolant& interp, const IntegratorConfig& cfg,
                                        const std::vector<double>& mus, double central_eps = 0.0);

struct DecayFit {
  double rate = 0.0;
  double r2 = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of log(err_l2) against t over records with
/// t_start <= t <= t_stop, and the R^2 of the fit.
DecayFit fit_decay_rate(const std::vector<RunRecord>& records, double t_start, double t_stop);

struct DecayWindow {
  double t_start = 0.0;
  double t_stop = 0.0;
  bool found = false;
};

/// From the first time err_l2 falls below half its initial value to the first
/// time sqrt(err_l2) falls below 1e3 * eps * sqrt(l2_u^2 + l2_b^2) (or the end).
DecayWindow select_decay_window(const std::vector<RunRecord>& records);

struct CdaSummary {
  double initial_error = 0.0;
  double min_error = 0.0;
  double final_error = 0.0;
  double orders = 0.0;  // log10(initial / min)
  DecayWindow window;
  DecayFit fit;
};
CdaSummary summarize_cda(const std::vector<RunRecord>& records);

}  // namespace pemda
