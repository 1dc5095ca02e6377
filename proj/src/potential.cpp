#include "mpg/potential.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "mpg/evaluation.hpp"
#include "mpg/rng.hpp"

namespace mpg {

namespace {

std::vector<int> action_strides(const TabularStochasticGame& game) {
  std::vector<int> stride(game.agent_count, 1);
  for (int i = 1; i < game.agent_count; ++i)
    stride[i] = stride[i - 1] * game.action_counts[i - 1];
  return stride;
}

int digit_of(int flat, int stride, int count) { return (flat / stride) % count; }

void check_potential_shape(const TabularStochasticGame& game,
                           const OneShotPotential& potential) {
  if (potential.state_count != game.state_count ||
      potential.joint_action_count != game.joint_action_count() ||
      potential.table.size() !=
          static_cast<std::size_t>(game.state_count) *
              game.joint_action_count())
    throw std::invalid_argument("potential shape does not match the game");
}

std::vector<double> residuals_for_table(const TabularStochasticGame& game,
                                        std::span<const double> table) {
  const int ja = game.joint_action_count();
  const std::size_t block = static_cast<std::size_t>(game.state_count) * ja;
  if (table.size() != block)
    throw std::invalid_argument("potential table shape mismatch");
  std::vector<double> d(static_cast<std::size_t>(game.agent_count) * block);
  for (int i = 0; i < game.agent_count; ++i) {
    const std::span<const double> r = game.payoff_table(i);
    double* out = d.data() + block * i;
    for (std::size_t k = 0; k < block; ++k) out[k] = r[k] - table[k];
  }
  return d;
}

struct FiberSpread {
  double residual = 0.0;
  int agent = 0, state = 0, flat_hi = 0, flat_lo = 0;
};

/// Max spread of d_i along agent i's own action, over all agents, states and
/// opponent profiles. Zero iff `table` satisfies the one-shot deviation
/// identity exactly.
FiberSpread max_own_action_spread(const TabularStochasticGame& game,
                                  std::span<const double> d) {
  const int ja = game.joint_action_count();
  const std::size_t block = static_cast<std::size_t>(game.state_count) * ja;
  const std::vector<int> stride = action_strides(game);
  FiberSpread best;
  for (int i = 0; i < game.agent_count; ++i) {
    const int count = game.action_counts[i];
    const double* di = d.data() + block * i;
    for (int s = 0; s < game.state_count; ++s) {
      const double* row = di + static_cast<std::size_t>(s) * ja;
      for (int base = 0; base < ja; ++base) {
        if (digit_of(base, stride[i], count) != 0) continue;
        int flat_lo = base, flat_hi = base;
        double lo = row[base], hi = row[base];
        for (int a = 1; a < count; ++a) {
          int flat = base + a * stride[i];
          double v = row[flat];
          if (v < lo) lo = v, flat_lo = flat;
          if (v > hi) hi = v, flat_hi = flat;
        }
        if (hi - lo > best.residual)
          best = {hi - lo, i, s, flat_hi, flat_lo};
      }
    }
  }
  return best;
}

}  // namespace

const char* condition_name(ConditionId id) {
  switch (id) {
    case ConditionId::AgentIndependentTransitions:
      return "agent_independent_transitions";
    case ConditionId::DummyTerms:
      return "dummy_terms";
    case ConditionId::StateTransitivity:
      return "state_transitivity";
    case ConditionId::CompleteStateTransitivity:
      return "complete_state_transitivity";
  }
  return "unknown";
}

double potential_verification_residual(const TabularStochasticGame& game,
                                       std::span<const double> table) {
  std::vector<double> d = residuals_for_table(game, table);
  return max_own_action_spread(game, d).residual;
}

PotentialSearchResult find_one_shot_potential(const TabularStochasticGame& game,
                                              double tolerance) {
  const int ja = game.joint_action_count();
  const int n = game.agent_count;
  const std::vector<int> stride = action_strides(game);

  OneShotPotential pot;
  pot.state_count = game.state_count;
  pot.joint_action_count = ja;
  pot.anchor_profile.assign(n, 0);
  pot.table.assign(static_cast<std::size_t>(game.state_count) * ja, 0.0);

  // Path sums from the anchor, switching agents in index order.
  std::vector<int> digits(n, 0);
  for (int s = 0; s < game.state_count; ++s) {
    std::fill(digits.begin(), digits.end(), 0);
    for (int flat = 0; flat < ja; ++flat) {
      double acc = 0.0;
      int running = 0;
      for (int i = 0; i < n; ++i) {
        int prev = running;
        running += digits[i] * stride[i];
        acc += game.payoff(i, s, running) - game.payoff(i, s, prev);
      }
      pot.table[static_cast<std::size_t>(s) * ja + flat] = acc;
      for (int i = 0; i < n; ++i) {
        if (++digits[i] < game.action_counts[i]) break;
        digits[i] = 0;
      }
    }
  }

  pot.verification_residual =
      potential_verification_residual(game, pot.table);
  PotentialSearchResult result;
  if (pot.verification_residual <= tolerance) {
    result.potential = std::move(pot);
    return result;
  }

  // No exact potential: hunt the largest four-step deviation cycle.
  DeviationCycle best;
  double best_abs = -1.0;
  for (int s = 0; s < game.state_count; ++s) {
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        const int si = stride[i], sj = stride[j];
        const int ci = game.action_counts[i], cj = game.action_counts[j];
        for (int base = 0; base < ja; ++base) {
          if (digit_of(base, si, ci) != 0 || digit_of(base, sj, cj) != 0)
            continue;
          for (int ai = 0; ai < ci; ++ai) {
            for (int ai2 = ai + 1; ai2 < ci; ++ai2) {
              for (int aj = 0; aj < cj; ++aj) {
                for (int aj2 = aj + 1; aj2 < cj; ++aj2) {
                  int x00 = base + ai * si + aj * sj;
                  int x10 = base + ai2 * si + aj * sj;
                  int x11 = base + ai2 * si + aj2 * sj;
                  int x01 = base + ai * si + aj2 * sj;
                  double sum = (game.payoff(i, s, x10) - game.payoff(i, s, x00)) +
                               (game.payoff(j, s, x11) - game.payoff(j, s, x10)) +
                               (game.payoff(i, s, x01) - game.payoff(i, s, x11)) +
                               (game.payoff(j, s, x00) - game.payoff(j, s, x01));
                  if (std::abs(sum) > best_abs) {
                    best_abs = std::abs(sum);
                    best.state = s;
                    best.agent_a = i;
                    best.agent_b = j;
                    best.base_profile = game.unflatten_action(x00);
                    best.alt_action_a = ai2;
                    best.alt_action_b = aj2;
                    best.payoff_sum = sum;
                  }
                }
              }
            }
          }
        }
      }
    }
  }
  result.cycle = std::move(best);
  return result;
}

OneShotPotential calibrate_state_offsets(const TabularStochasticGame& game,
                                         const OneShotPotential& potential) {
  check_potential_shape(game, potential);
  const int ja = game.joint_action_count();
  const int anchor = game.flatten_action(potential.anchor_profile);

  auto anchor_residual = [&](int s) {
    return game.payoff(0, s, anchor) - potential.value(s, anchor);
  };

  OneShotPotential out = potential;
  const double base = anchor_residual(0);
  for (int s = 0; s < game.state_count; ++s) {
    double kappa = anchor_residual(s) - base;  // kappa(0) == 0 exactly
    double* row = out.table.data() + static_cast<std::size_t>(s) * ja;
    for (int a = 0; a < ja; ++a) row[a] += kappa;
  }
  out.verification_residual =
      potential_verification_residual(game, out.table);
  return out;
}

std::vector<double> residual_table(const TabularStochasticGame& game,
                                   const OneShotPotential& potential) {
  check_potential_shape(game, potential);
  return residuals_for_table(game, potential.table);
}

ConditionReport check_agent_independent_transitions(
    const TabularStochasticGame& game, double tolerance) {
  ConditionReport report;
  report.condition = ConditionId::AgentIndependentTransitions;
  report.tolerance = tolerance;
  report.witness_note = "(state, joint_action_a, joint_action_b, next_state)";

  const int ja = game.joint_action_count();
  const int S = game.state_count;
  std::vector<double> maxp(S), minp(S);
  std::vector<int> seen(S);

  double best = 0.0;
  int best_state = 0, best_next = 0;
  for (int s = 0; s < S; ++s) {
    std::fill(maxp.begin(), maxp.end(), 0.0);
    std::fill(minp.begin(), minp.end(),
              std::numeric_limits<double>::infinity());
    std::fill(seen.begin(), seen.end(), 0);
    for (int a = 0; a < ja; ++a)
      for (const TransitionEntry& e : game.transition_row(s, a)) {
        maxp[e.next_state] = std::max(maxp[e.next_state], e.probability);
        minp[e.next_state] = std::min(minp[e.next_state], e.probability);
        seen[e.next_state] += 1;
      }
    for (int t = 0; t < S; ++t) {
      if (seen[t] == 0) continue;
      double lo = seen[t] < ja ? std::min(0.0, minp[t]) : minp[t];
      double spread = maxp[t] - lo;
      if (spread > best) {
        best = spread;
        best_state = s;
        best_next = t;
      }
    }
  }

  report.max_residual = best;
  report.passed = best <= tolerance;
  if (!report.passed) {
    // Recover the joint-action pair attaining the spread at (state, next).
    auto prob_at = [&](int a) {
      for (const TransitionEntry& e : game.transition_row(best_state, a))
        if (e.next_state == best_next) return e.probability;
      return 0.0;
    };
    int arg_hi = 0, arg_lo = 0;
    double hi = -1.0, lo = std::numeric_limits<double>::infinity();
    for (int a = 0; a < ja; ++a) {
      double p = prob_at(a);
      if (p > hi) hi = p, arg_hi = a;
      if (p < lo) lo = p, arg_lo = a;
    }
    report.witness = {best_state, arg_hi, arg_lo, best_next};
  }
  return report;
}

namespace {

/// Shared state for the Condition-2 gradient probe at one policy point.
/// Everything is exact linear algebra: U_i under a one-row perturbation of
/// the probed policy comes from a Sherman-Morrison update of the factored
/// base system, so the central differences carry no sampling noise.
struct GradientProbe {
  const TabularStochasticGame& game;
  std::span<const double> d;  // residual tensor, agent-major
  Eigen::PartialPivLU<Eigen::MatrixXd> lu;
  std::vector<Eigen::VectorXd> z;  // z[s] = A^{-1} e_s, filled lazily
  std::vector<char> z_ready;

  GradientProbe(const TabularStochasticGame& g, std::span<const double> dd,
                const std::vector<double>& p_pi)
      : game(g), d(dd) {
    const int S = g.state_count;
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(S, S);
    for (int s = 0; s < S; ++s)
      for (int t = 0; t < S; ++t)
        a(s, t) -= g.discount * p_pi[static_cast<std::size_t>(s) * S + t];
    lu.compute(a);
    z.resize(S);
    z_ready.assign(S, 0);
  }

  const Eigen::VectorXd& column(int s) {
    if (!z_ready[s]) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(game.state_count);
      e(s) = 1.0;
      z[s] = lu.solve(e);
      z_ready[s] = 1;
    }
    return z[s];
  }
};

}  // namespace

ConditionReport check_dummy_terms(const TabularStochasticGame& game,
                                  const OneShotPotential& potential,
                                  double fd_step, double tolerance,
                                  int random_probe_count,
                                  std::uint64_t probe_seed) {
  check_potential_shape(game, potential);
  if (!(fd_step > 0.0))
    throw std::invalid_argument("check_dummy_terms: fd_step must be positive");

  ConditionReport report;
  report.condition = ConditionId::DummyTerms;
  report.tolerance = tolerance;

  const int ja = game.joint_action_count();
  const int S = game.state_count;
  const int n = game.agent_count;
  const std::size_t block = static_cast<std::size_t>(S) * ja;
  const std::vector<double> d = residuals_for_table(game, potential.table);
  const std::vector<int> stride = action_strides(game);

  // Sub-check (a): d_i independent of agent i's own action.
  FiberSpread structural = max_own_action_spread(game, d);

  // Sub-check (b): tangent directional derivatives of U_i at probe policies.
  double gradient_residual = 0.0;
  std::vector<int> gradient_witness;  // (agent, state, action_hi, action_lo)

  std::vector<JointPolicy> probes;
  probes.push_back(uniform_policy(game));
  for (int p = 0; p < random_probe_count; ++p) {
    Rng rng(probe_seed + static_cast<std::uint64_t>(p));
    JointPolicy pol = uniform_policy(game);
    for (int i = 0; i < n; ++i)
      for (int s = 0; s < S; ++s) {
        auto row = pol.row_mut(i, s);
        double sum = 0.0;
        for (double& v : row) {
          v = 0.2 + rng.uniform01();
          sum += v;
        }
        for (double& v : row) v /= sum;
      }
    probes.push_back(std::move(pol));
  }

  std::vector<double> rho;   // [state][own action] conditional dummy
  std::vector<double> cond;  // [state][own action][next] conditional kernel
  std::vector<int> digits(n);
  for (const JointPolicy& probe : probes) {
    for (int i = 0; i < n; ++i)
      for (int s = 0; s < S; ++s)
        for (double v : probe.row(i, s))
          if (v < 2.0 * fd_step)
            throw std::invalid_argument(
                "check_dummy_terms: fd_step too large for the probe policy "
                "interior");

    const std::vector<double> p_pi = marginal_transition_matrix(game, probe);
    GradientProbe solver(game, d, p_pi);

    for (int i = 0; i < n; ++i) {
      const int count = game.action_counts[i];
      const double* di = d.data() + block * i;

      rho.assign(static_cast<std::size_t>(S) * count, 0.0);
      cond.assign(static_cast<std::size_t>(S) * count * S, 0.0);
      for (int s = 0; s < S; ++s) {
        std::fill(digits.begin(), digits.end(), 0);
        for (int a = 0; a < ja; ++a) {
          double w = 1.0;
          for (int j = 0; j < n; ++j)
            if (j != i) w *= probe.prob(j, s, digits[j]);
          if (w > 0.0) {
            const int own = digits[i];
            rho[static_cast<std::size_t>(s) * count + own] +=
                w * di[static_cast<std::size_t>(s) * ja + a];
            double* crow =
                cond.data() +
                (static_cast<std::size_t>(s) * count + own) * S;
            for (const TransitionEntry& e : game.transition_row(s, a))
              crow[e.next_state] += w * e.probability;
          }
          for (int j = 0; j < n; ++j) {
            if (++digits[j] < game.action_counts[j]) break;
            digits[j] = 0;
          }
        }
      }

      // Base expected dummy reward and base solve.
      Eigen::VectorXd rbar(S);
      for (int s = 0; s < S; ++s) {
        double acc = 0.0;
        for (int a = 0; a < count; ++a)
          acc += probe.prob(i, s, a) *
                 rho[static_cast<std::size_t>(s) * count + a];
        rbar(s) = acc;
      }
      const Eigen::VectorXd y = solver.lu.solve(rbar);

      for (int s = 0; s < S; ++s) {
        const Eigen::VectorXd& zs = solver.column(s);
        double g_hi = 0.0, g_lo = 0.0;  // derivative 0 along e_0 - e_0
        int arg_hi = 0, arg_lo = 0;
        for (int a = 1; a < count; ++a) {
          Eigen::VectorXd delta_row(S);
          const double* ca =
              cond.data() + (static_cast<std::size_t>(s) * count + a) * S;
          const double* c0 =
              cond.data() + (static_cast<std::size_t>(s) * count + 0) * S;
          for (int t = 0; t < S; ++t) delta_row(t) = ca[t] - c0[t];
          const double delta_r = rho[static_cast<std::size_t>(s) * count + a] -
                                 rho[static_cast<std::size_t>(s) * count + 0];

          double u_side[2];
          for (int side = 0; side < 2; ++side) {
            const double h = side == 0 ? fd_step : -fd_step;
            // Row update P(s,.) += h * delta_row, so A gains the rank-one
            // term -(gamma*h) e_s delta_row^T.
            const Eigen::VectorXd v = -(game.discount * h) * delta_row;
            const Eigen::VectorXd w_vec = y + (h * delta_r) * zs;
            const double denom = 1.0 + v.dot(zs);
            u_side[side] = w_vec(s) - zs(s) * (v.dot(w_vec) / denom);
          }
          const double g = (u_side[0] - u_side[1]) / (2.0 * fd_step);
          if (g > g_hi) g_hi = g, arg_hi = a;
          if (g < g_lo) g_lo = g, arg_lo = a;
        }
        // Max |derivative| over every tangent direction e_a - e_b.
        const double spread = g_hi - g_lo;
        if (spread > gradient_residual) {
          gradient_residual = spread;
          gradient_witness = {i, s, arg_hi, arg_lo};
        }
      }
    }
  }

  if (structural.residual >= gradient_residual) {
    report.max_residual = structural.residual;
    report.witness = {structural.agent, structural.state, structural.flat_hi,
                      structural.flat_lo};
    report.witness_note =
        "structural: (agent, state, joint_action_hi, joint_action_lo)";
  } else {
    report.max_residual = gradient_residual;
    report.witness = gradient_witness;
    report.witness_note = "gradient: (agent, state, action_hi, action_lo)";
  }
  report.passed =
      structural.residual <= tolerance && gradient_residual <= tolerance;
  return report;
}

ConditionReport check_state_transitivity(const TabularStochasticGame& game,
                                         const OneShotPotential& potential,
                                         double tolerance) {
  check_potential_shape(game, potential);
  ConditionReport report;
  report.condition = ConditionId::StateTransitivity;
  report.tolerance = tolerance;
  report.witness_note = "(agent, state_hi, state_lo, joint_action)";

  const int ja = game.joint_action_count();
  const std::size_t block = static_cast<std::size_t>(game.state_count) * ja;
  const std::vector<double> d = residuals_for_table(game, potential.table);

  double best = 0.0;
  for (int i = 0; i < game.agent_count; ++i) {
    const double* di = d.data() + block * i;
    for (int a = 0; a < ja; ++a) {
      double lo = di[a], hi = di[a];
      int s_lo = 0, s_hi = 0;
      for (int s = 1; s < game.state_count; ++s) {
        double v = di[static_cast<std::size_t>(s) * ja + a];
        if (v < lo) lo = v, s_lo = s;
        if (v > hi) hi = v, s_hi = s;
      }
      if (hi - lo > best) {
        best = hi - lo;
        report.witness = {i, s_hi, s_lo, a};
      }
    }
  }
  report.max_residual = best;
  report.passed = best <= tolerance;
  return report;
}

ConditionReport check_complete_state_transitivity(
    const TabularStochasticGame& game, const OneShotPotential& potential,
    double tolerance, int spot_check_count, std::uint64_t spot_seed) {
  check_potential_shape(game, potential);
  ConditionReport report;
  report.condition = ConditionId::CompleteStateTransitivity;
  report.tolerance = tolerance;
  report.witness_note = "(agent, state_hi, joint_action_hi, state_lo, joint_action_lo)";

  if (game.state_count < 2) {
    report.passed = true;
    report.vacuous = true;
    return report;
  }

  const int ja = game.joint_action_count();
  const std::size_t block = static_cast<std::size_t>(game.state_count) * ja;
  const std::vector<double> d = residuals_for_table(game, potential.table);

  double best = 0.0;
  for (int i = 0; i < game.agent_count; ++i) {
    const double* di = d.data() + block * i;
    // Per-state extremes of d_i, then the max spread over distinct states.
    std::vector<double> smax(game.state_count), smin(game.state_count);
    std::vector<int> amax(game.state_count), amin(game.state_count);
    for (int s = 0; s < game.state_count; ++s) {
      const double* row = di + static_cast<std::size_t>(s) * ja;
      double lo = row[0], hi = row[0];
      int alo = 0, ahi = 0;
      for (int a = 1; a < ja; ++a) {
        if (row[a] < lo) lo = row[a], alo = a;
        if (row[a] > hi) hi = row[a], ahi = a;
      }
      smax[s] = hi, smin[s] = lo, amax[s] = ahi, amin[s] = alo;
    }
    for (int s = 0; s < game.state_count; ++s)
      for (int t = 0; t < game.state_count; ++t) {
        if (s == t) continue;
        double spread = smax[s] - smin[t];
        if (spread > best) {
          best = spread;
          report.witness = {i, s, amax[s], t, amin[t]};
        }
      }
  }
  report.max_residual = best;
  report.passed = best <= tolerance;

  // Expectation-form spot checks on seeded stochastic policies.
  Rng rng(spot_seed);
  double stochastic = 0.0;
  for (int k = 0; k < spot_check_count; ++k) {
    JointPolicy pol = uniform_policy(game);
    for (int i = 0; i < game.agent_count; ++i)
      for (int s = 0; s < game.state_count; ++s) {
        auto row = pol.row_mut(i, s);
        double sum = 0.0;
        for (double& v : row) {
          v = -std::log(1.0 - rng.uniform01());
          sum += v;
        }
        for (double& v : row) v /= sum;
      }
    for (int i = 0; i < game.agent_count; ++i) {
      std::vector<double> g = expected_reward_under_policy(
          game, pol,
          std::span<const double>(d.data() + block * i, block));
      for (int s = 0; s < game.state_count; ++s)
        for (int t = s + 1; t < game.state_count; ++t)
          stochastic = std::max(stochastic, std::abs(g[s] - g[t]));
    }
  }
  report.stochastic_residual = stochastic;
  report.spot_checks_consistent = !(report.passed && stochastic > tolerance);
  return report;
}

AlignmentReport check_value_potential_alignment(
    const TabularStochasticGame& game, const OneShotPotential& potential,
    const JointPolicy& policy, const JointPolicy& deviation, int agent,
    int start_state, double solver_tolerance) {
  check_potential_shape(game, potential);
  if (agent < 0 || agent >= game.agent_count)
    throw std::invalid_argument("alignment: agent index out of range");
  if (start_state < 0 || start_state >= game.state_count)
    throw std::invalid_argument("alignment: start state out of range");
  for (int i = 0; i < game.agent_count; ++i)
    if (i != agent && policy.tables[i] != deviation.tables[i])
      throw std::invalid_argument(
          "alignment: deviation must differ only in the deviating agent's "
          "table");

  AlignmentReport report;
  report.agent = agent;
  report.start_state = start_state;
  const double v_pi =
      evaluate_policy(game, policy, agent, solver_tolerance).values[start_state];
  const double v_dev =
      evaluate_policy(game, deviation, agent, solver_tolerance)
          .values[start_state];
  const double b_pi =
      potential_value(game, potential.table, policy, solver_tolerance)
          .values[start_state];
  const double b_dev =
      potential_value(game, potential.table, deviation, solver_tolerance)
          .values[start_state];
  report.delta_value = v_pi - v_dev;
  report.delta_potential = b_pi - b_dev;
  report.misalignment = std::abs(report.delta_value - report.delta_potential);
  return report;
}

CstGame generate_cst_game(std::uint64_t seed, int agent_count, int state_count,
                          const std::vector<int>& action_counts,
                          double discount) {
  if (agent_count < 1 || state_count < 1 ||
      static_cast<int>(action_counts.size()) != agent_count)
    throw std::invalid_argument("generate_cst_game: bad sizes");
  if (!(discount > 0.0 && discount < 1.0))
    throw std::invalid_argument("generate_cst_game: discount outside (0,1)");

  Rng rng(seed);
  CstGame out;
  TabularStochasticGame& game = out.game;
  game.agent_count = agent_count;
  game.state_count = state_count;
  game.action_counts = action_counts;
  game.discount = discount;

  const int ja = game.joint_action_count();
  const std::size_t block = static_cast<std::size_t>(state_count) * ja;

  std::vector<double> phi(block);
  for (double& v : phi) v = rng.uniform(-1.0, 1.0);
  out.residual_constants.resize(agent_count);
  for (double& c : out.residual_constants) c = rng.uniform(-1.0, 1.0);

  game.payoffs.resize(static_cast<std::size_t>(agent_count) * block);
  for (int i = 0; i < agent_count; ++i)
    for (std::size_t k = 0; k < block; ++k)
      game.payoffs[block * i + k] = phi[k] + out.residual_constants[i];

  game.transitions.reserve(state_count * ja,
                           static_cast<std::size_t>(state_count) * ja *
                               state_count);
  std::vector<TransitionEntry> row(state_count);
  for (int s = 0; s < state_count; ++s)
    for (int a = 0; a < ja; ++a) {
      double sum = 0.0;
      for (int t = 0; t < state_count; ++t) {
        row[t] = {t, rng.uniform(0.1, 1.0)};
        sum += row[t].probability;
      }
      for (int t = 0; t < state_count; ++t) row[t].probability /= sum;
      game.transitions.push_row(row);
    }

  out.potential.state_count = state_count;
  out.potential.joint_action_count = ja;
  out.potential.table = std::move(phi);
  out.potential.anchor_profile.assign(agent_count, 0);
  out.potential.verification_residual =
      potential_verification_residual(game, out.potential.table);
  return out;
}

}  // namespace mpg
