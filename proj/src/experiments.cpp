#include "pemda/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include <fmt/format.h>

#include "pemda/errors.hpp"

namespace pemda {

StoredSource::StoredSource(const Trajectory& traj) : traj_(traj) {
  if (traj.cfg.checkpoint_stride != 1) throw ValidationError("stored observations need a state at every step");
}

const PemState& StoredSource::bootstrap_stage() { return traj_.stage ? *traj_.stage : at(1); }

const PemState& StoredSource::at(std::size_t n) {
  if (n >= traj_.states.size()) {
    throw AlignmentError(fmt::format("stored trajectory has no state for step {} ({} stored)", n, traj_.states.size()));
  }
  return traj_.states[n];
}

LockstepReference::LockstepReference(PemState init, PemParams params, IntegratorConfig cfg)
    : integ_(std::move(init), params, cfg) {}

const PemState& LockstepReference::bootstrap_stage() {
  if (integ_.steps_taken() == 0) at(1);
  if (!stage_) throw AlignmentError("lockstep reference: the first-step stage is not available");
  return *stage_;
}

const PemState& LockstepReference::at(std::size_t n) {
  while (integ_.steps_taken() < n) {
    integ_.advance(StepExternals::uniform(ReferenceSystem{}));
    if (integ_.stage()) stage_ = *integ_.stage();
  }
  if (n == integ_.steps_taken()) return integ_.state();
  if (n + 1 == integ_.steps_taken()) return integ_.previous();
  throw AlignmentError(fmt::format("lockstep reference is at step {}; step {} is gone", integ_.steps_taken(), n));
}

namespace {

double vec_norm(const VectorField2& w) { return std::sqrt(l2_norm_squared(w)); }

void require_admissible(const PemState& s, const char* what) {
  const AdmissibilityReport a = check_admissible(s);
  if (!a.ok(1e-9)) {
    throw ValidationError(fmt::format("{} is not admissible (parity defect {:.3g}, barotropic divergence {:.3g}/{:.3g})",
                                      what, a.parity_defect, a.baro_div_u, a.baro_div_b));
  }
}

class Emitter {
 public:
  Emitter(Trajectory& tr, const RunHooks& hooks) : tr_(tr), hooks_(hooks) {}
  void operator()(RunRecord r) {
    if (hooks_.on_record) hooks_.on_record(r);
    tr_.records.push_back(std::move(r));
  }

 private:
  Trajectory& tr_;
  const RunHooks& hooks_;
};

}  // namespace

RunRecord make_record(const PemState& s, double dt, const StepInfo* info, const PemState* reference) {
  RunRecord r;
  r.t = s.time;
  r.dt = dt;
  r.norms = norms(s);
  if (reference) r.err_l2 = l2_norm_squared(s.u - reference->u) + l2_norm_squared(s.b - reference->b);
  if (info) r.budget_residual = info->budget_residual;
  const AdmissibilityReport a = check_admissible(s);
  r.baro_div_u = a.baro_div_u;
  r.baro_div_b = a.baro_div_b;
  return r;
}

Trajectory run_reference(const PemState& init, const PemParams& params, const IntegratorConfig& cfg,
                         const RunHooks& hooks) {
  require_admissible(init, "initial state");
  Integrator integ(init, params, cfg);
  Trajectory tr{params, cfg, {init}, {}, {}};
  Emitter emit(tr, hooks);
  emit(make_record(init, cfg.dt, nullptr, nullptr));
  const StepExternals ext = StepExternals::uniform(ReferenceSystem{});
  const std::size_t steps = cfg.steps();
  for (std::size_t n = 1; n <= steps; ++n) {
    integ.advance(ext);
    if (integ.stage()) tr.stage = *integ.stage();
    emit(make_record(integ.state(), cfg.dt, &integ.last_info(), nullptr));
    if (n % static_cast<std::size_t>(cfg.checkpoint_stride) == 0) tr.states.push_back(integ.state());
  }
  return tr;
}

Trajectory run_cda(StateSource& reference, const PemState& init_guess, const PemParams& params,
                   const Interpolant& interp, const IntegratorConfig& cfg, const RunHooks& hooks) {
  require_admissible(init_guess, "initial guess");
  if (!interp.grid().same_shape(init_guess.grid())) throw ValidationError("interpolant grid differs from the state grid");
  Integrator integ(init_guess, params, cfg);
  Trajectory tr{params, cfg, {init_guess}, {}, {}};
  Emitter emit(tr, hooks);
  emit(make_record(init_guess, cfg.dt, nullptr, &reference.at(0)));
  const std::size_t steps = cfg.steps();
  for (std::size_t n = 0; n < steps; ++n) {
    const PemState& obs1 = reference.at(n + 1);
    const PemState& obs0 = reference.at(n);
    const NudgedSystem s0{&interp, &obs0};
    const NudgedSystem s1{&interp, &obs1};
    const NudgedSystem stage{&interp, n == 0 ? &reference.bootstrap_stage() : &obs1};
    integ.advance({s0, stage, s1});
    emit(make_record(integ.state(), cfg.dt, &integ.last_info(), &obs1));
    if ((n + 1) % static_cast<std::size_t>(cfg.checkpoint_stride) == 0) tr.states.push_back(integ.state());
  }
  return tr;
}

ConvergenceReport run_sensitivity_study(const PemState& reference_init, const PemState& guess, const PemParams& params,
                                        const Interpolant& interp, const IntegratorConfig& cfg,
                                        const std::vector<double>& mus, double central_eps) {
  params.validate();
  if (params.kappa != params.mu || params.sigma != params.nu) {
    throw ValidationError("the sensitivity study requires kappa == mu and sigma == nu");
  }
  if (mus.empty()) throw ValidationError("the sensitivity study needs at least one mu_n");
  for (double m : mus) {
    if (!(m > 0.0)) throw ValidationError(fmt::format("mu_n must be positive (got {})", m));
    if (m == params.mu) throw ValidationError(fmt::format("mu_n = {} equals mu; the quotient is undefined", m));
  }
  if (central_eps < 0.0 || central_eps >= params.mu) {
    throw ValidationError("central-difference eps must lie in [0, mu)");
  }
  require_admissible(reference_init, "reference initial state");
  require_admissible(guess, "initial guess");

  auto at_mu = [&](double m) {
    PemParams p = params;
    p.mu = m;
    p.kappa = m;
    return p;
  };
  PemParams ref_params = params;
  ref_params.beta_u = ref_params.beta_b = 0.0;

  Integrator reference(reference_init, ref_params, cfg);
  Integrator base(guess, params, cfg);
  Integrator tangent(PemState::zero(guess.grid()), params, cfg);
  std::vector<std::unique_ptr<Integrator>> family;
  for (double m : mus) family.push_back(std::make_unique<Integrator>(guess, at_mu(m), cfg));
  std::unique_ptr<Integrator> plus, minus;
  if (central_eps > 0.0) {
    plus = std::make_unique<Integrator>(guess, at_mu(params.mu + central_eps), cfg);
    minus = std::make_unique<Integrator>(guess, at_mu(params.mu - central_eps), cfg);
  }

  ConvergenceReport report;
  report.mus = mus;
  report.errors.assign(mus.size(), 0.0);
  report.central_eps = central_eps;

  auto compare = [&]() {
    const PemState& s = tangent.state();
    report.sensitivity_size = std::max(report.sensitivity_size, vec_norm(s.u) + vec_norm(s.b));
    for (std::size_t i = 0; i < mus.size(); ++i) {
      const double scale = 1.0 / (params.mu - mus[i]);
      const PemState& other = family[i]->state();
      const VectorField2 qu = scale * (base.state().u - other.u);
      const VectorField2 qb = scale * (base.state().b - other.b);
      report.errors[i] = std::max(report.errors[i], vec_norm(qu - s.u) + vec_norm(qb - s.b));
    }
    if (plus) {
      const double scale = 0.5 / central_eps;
      const VectorField2 cu = scale * (plus->state().u - minus->state().u);
      const VectorField2 cb = scale * (plus->state().b - minus->state().b);
      report.central_error = std::max(report.central_error, vec_norm(cu - s.u) + vec_norm(cb - s.b));
    }
  };

  compare();
  const std::size_t steps = cfg.steps();
  const StepExternals reference_step = StepExternals::uniform(ReferenceSystem{});
  for (std::size_t n = 1; n <= steps; ++n) {
    reference.advance(reference_step);
    const NudgedSystem obs0{&interp, &reference.previous()};
    const NudgedSystem obs1{&interp, &reference.state()};
    const NudgedSystem obs_stage{&interp, reference.stage() ? reference.stage() : &reference.state()};
    const StepExternals nudged{obs0, obs_stage, obs1};
    base.advance(nudged);
    for (auto& f : family) f->advance(nudged);
    if (plus) {
      plus->advance(nudged);
      minus->advance(nudged);
    }
    const PemState* stage = base.stage();
    const SensitivitySystem t0{&interp, &base.previous()};
    const SensitivitySystem t1{&interp, &base.state()};
    const SensitivitySystem ts{&interp, stage ? stage : &base.state()};
    tangent.advance({t0, ts, t1});
    if (n % static_cast<std::size_t>(cfg.checkpoint_stride) == 0) compare();
  }

  for (std::size_t i = 0; i + 1 < report.errors.size(); ++i) {
    report.ratios.push_back(report.errors[i + 1] > 0.0 ? report.errors[i] / report.errors[i + 1] : 0.0);
  }
  return report;
}

CdaSummary summarize_cda(const std::vector<RunRecord>& records) {
  CdaSummary s;
  if (records.empty() || !records.front().err_l2) throw ValidationError("CDA records carry no error column");
  s.initial_error = *records.front().err_l2;
  s.min_error = s.initial_error;
  for (const RunRecord& r : records) {
    if (r.err_l2) s.min_error = std::min(s.min_error, *r.err_l2);
  }
  s.final_error = records.back().err_l2.value_or(0.0);
  s.orders = s.min_error > 0.0 ? std::log10(s.initial_error / s.min_error) : INFINITY;
  s.window = select_decay_window(records);
  if (s.window.found) s.fit = fit_decay_rate(records, s.window.t_start, s.window.t_stop);
  return s;
}

}  // namespace pemda
