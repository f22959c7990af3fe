#include "mg/grade.hpp"

#include <algorithm>
#include <cmath>

namespace mg {

namespace {

// Values of the policy that plays exactly the states flagged in `play`.
Eigen::VectorXd evaluate_policy(const MarkovSystem& s, const std::vector<char>& play, double g) {
  const int n = s.size();
  std::vector<int> idx;
  idx.reserve(static_cast<std::size_t>(n));
  for (int u = 0; u < n; ++u)
    if (u != s.target && play[static_cast<std::size_t>(u)]) idx.push_back(u);

  Eigen::VectorXd values = Eigen::VectorXd::Zero(n);
  values(s.target) = g;
  const int m = static_cast<int>(idx.size());
  if (m == 0) return values;

  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    const int u = idx[static_cast<std::size_t>(i)];
    for (int j = 0; j < m; ++j) a(i, j) -= s.transition(u, idx[static_cast<std::size_t>(j)]);
    b(i) = -s.move_cost(u) + g * s.transition(u, s.target);
  }
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  if (!(std::abs(lu.determinant()) > 0.0)) throw Error("singular policy system in stopping solver");
  const Eigen::VectorXd x = lu.solve(b);
  for (int i = 0; i < m; ++i) values(idx[static_cast<std::size_t>(i)]) = x(i);
  return values;
}

// Solves (I - P_SS) x_S = rhs_S over the states in `set`; other entries 0.
Eigen::VectorXd solve_restricted(const MarkovSystem& s, const std::vector<int>& set, const Eigen::VectorXd& rhs) {
  const int m = static_cast<int>(set.size());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(s.size());
  if (m == 0) return out;
  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd b(m);
  for (int i = 0; i < m; ++i) {
    const int u = set[static_cast<std::size_t>(i)];
    for (int j = 0; j < m; ++j) a(i, j) -= s.transition(u, set[static_cast<std::size_t>(j)]);
    b(i) = rhs(u);
  }
  const Eigen::VectorXd x = a.partialPivLu().solve(b);
  for (int i = 0; i < m; ++i) out(set[static_cast<std::size_t>(i)]) = x(i);
  return out;
}

}  // namespace

bool StoppingSolution::quits(StateId u) const {
  return std::find(quit_set.begin(), quit_set.end(), u) != quit_set.end();
}

StoppingSolution stopping_value(const MarkovSystem& s, double g) {
  if (g < 0.0) throw Error("profit level must be nonnegative");
  const int n = s.size();
  const double eps = 1e-12 * std::max(1.0, g);
  std::vector<char> play(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd values = evaluate_policy(s, play, g);

  StoppingSolution out;
  out.profit_level = g;
  const int max_iter = 4 * n + 16;
  for (int it = 0; it < max_iter; ++it) {
    ++out.iterations;
    bool changed = false;
    for (int u = 0; u < n; ++u) {
      if (u == s.target) continue;
      const double play_value = -s.move_cost(u) + s.transition.row(u).dot(values);
      auto& flag = play[static_cast<std::size_t>(u)];
      if (!flag && play_value > eps) {
        flag = 1;
        changed = true;
      } else if (flag && play_value < -eps) {
        flag = 0;
        changed = true;
      }
    }
    if (!changed) break;
    values = evaluate_policy(s, play, g);
  }

  // Ties toward quitting: states whose optimal value is (numerically) zero quit.
  bool cleaned = false;
  for (int u = 0; u < n; ++u) {
    if (u == s.target) continue;
    auto& flag = play[static_cast<std::size_t>(u)];
    if (flag && values(u) <= eps) {
      flag = 0;
      cleaned = true;
    }
  }
  if (cleaned) values = evaluate_policy(s, play, g);

  for (int u = 0; u < n; ++u)
    if (u != s.target && !play[static_cast<std::size_t>(u)]) out.quit_set.push_back(u);
  out.values = std::move(values);
  return out;
}

Eigen::VectorXd never_quit_costs(const MarkovSystem& s) {
  std::vector<int> set;
  for (int u = 0; u < s.size(); ++u)
    if (u != s.target) set.push_back(u);
  return solve_restricted(s, set, s.move_cost);
}

double never_quit_cost(const MarkovSystem& s, StateId from) {
  if (!s.valid_state(from)) throw Error("invalid state");
  return never_quit_costs(s)(from);
}

double compute_grade(const MarkovSystem& s, StateId u, double tol) {
  if (!(tol > 0.0)) throw Error("grade tolerance must be positive");
  if (!s.valid_state(u)) throw Error("invalid state");
  if (u == s.target) return 0.0;

  const double upper = never_quit_cost(s, u);
  if (!(upper > 0.0)) return 0.0;
  auto worth_playing = [&](double g) { return stopping_value(s, g).values(u) > tol * std::max(1.0, g); };

  double lo = 0.0;
  double hi = upper;
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (worth_playing(mid)) hi = mid;
    else lo = mid;
  }

  // On the piece of the value function just above the grade the optimal
  // policy is fixed, so the grade is its expected cost over its success
  // probability.
  const StoppingSolution at_hi = stopping_value(s, hi);
  if (at_hi.quits(u)) return hi;
  std::vector<int> play_set;
  for (int v = 0; v < s.size(); ++v)
    if (v != s.target && !at_hi.quits(v)) play_set.push_back(v);
  Eigen::VectorXd reach_rhs = Eigen::VectorXd::Zero(s.size());
  for (int v : play_set) reach_rhs(v) = s.transition(v, s.target);
  const double reach = solve_restricted(s, play_set, reach_rhs)(u);
  const double cost = solve_restricted(s, play_set, s.move_cost)(u);
  if (!(reach > 0.0)) return hi;
  const double snapped = cost / reach;
  const double slack = tol * std::max(1.0, lo) / reach + tol;
  if (snapped <= hi + tol && snapped >= lo - slack) return std::max(0.0, std::min(snapped, upper));
  return hi;
}

std::vector<double> compute_grades(const MarkovSystem& s, double tol) {
  std::vector<double> out(static_cast<std::size_t>(s.size()), 0.0);
  for (int u = 0; u < s.size(); ++u) out[static_cast<std::size_t>(u)] = compute_grade(s, u, tol);
  return out;
}

GradeTable compute_grade_table(const MarkovSystem& s, double switch_cost, double tol) {
  if (switch_cost < 0.0) throw Error("switch cost must be nonnegative");
  GradeTable t;
  t.switch_cost_used = switch_cost;
  t.grade = compute_grades(s, tol);
  t.dummy_grade.assign(static_cast<std::size_t>(s.size()), 0.0);
  const MarkovSystem augmented = build_dummy_system(s, switch_cost);
  for (int u = 0; u < s.size(); ++u) {
    if (u == s.target) continue;
    t.dummy_grade[static_cast<std::size_t>(u)] = compute_grade(augmented, dummy_state(s, u), tol);
  }
  return t;
}

PrevailingRecord prevailing_and_epochs(std::span<const StateId> path, const GradeTable& table) {
  PrevailingRecord r;
  r.prevailing.reserve(path.size());
  double current = 0.0;
  for (std::size_t k = 0; k < path.size(); ++k) {
    const double g = table.grade.at(static_cast<std::size_t>(path[k]));
    if (k == 0 || g > current) {
      current = g;
      r.epoch_starts.push_back(k);
    }
    r.prevailing.push_back(current);
  }
  return r;
}

TeasingOutcome simulate_teasing(const MarkovSystem& s, const GradeTable& table, RandomSource& rng,
                                long long step_cap) {
  TeasingOutcome out;
  StateId u = s.start;
  out.prevailing_cost = table.grade[static_cast<std::size_t>(u)];
  long long steps = 0;
  while (u != s.target) {
    if (steps++ >= step_cap) throw Error("step cap exceeded in teasing game");
    const StepResult r = step(s, u, rng);
    out.movement_cost += r.cost;
    u = r.next;
    out.prevailing_cost = std::max(out.prevailing_cost, table.grade[static_cast<std::size_t>(u)]);
  }
  return out;
}

TeasingOutcome simulate_teasing(const MarkovSystem& s, RandomSource& rng) {
  GradeTable table;
  table.grade = compute_grades(s);
  return simulate_teasing(s, table, rng);
}

}  // namespace mg
