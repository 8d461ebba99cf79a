// Acceptance suite: one PASS/FAIL line per criterion.
//
//   concord_acceptance              run everything
//   concord_acceptance --only 9     run selected criteria
//   concord_acceptance --skip 9     run all but these
//
// Exit status 0 when every criterion that ran passed, 1 on any failure, and
// 77 when every selected criterion was skipped for lack of hardware.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "concord/bench.hpp"
#include "concord/datagen.hpp"
#include "concord/schedule.hpp"
#include "concord/solver.hpp"
#include "oracles.hpp"

namespace {

using namespace concord;
using Clock = std::chrono::steady_clock;

enum class Outcome { Pass, Fail, Skip };

struct Verdict {
  Outcome outcome = Outcome::Fail;
  std::string detail;
};

Verdict verdict(bool ok, std::string detail) { return {ok ? Outcome::Pass : Outcome::Fail, std::move(detail)}; }

double seconds_since(Clock::time_point start) { return std::chrono::duration<double>(Clock::now() - start).count(); }

std::string fmt(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// ---------------------------------------------------------------------------
// The equivalence suite shared by criteria 4, 5, 6 and 7: 20 problems with
// p in {4, 6, 8, 12}, n = 5p, lambda in {0.1, 0.3}, AR(2) data, correlation
// penalty scale.

struct Problem {
  std::size_t p = 0;
  double lambda = 0;  // as entered by a user
  GramMatrixd gram;
  double penalty = 0;  // as it enters the objective
};

const std::vector<Problem>& suite() {
  static const std::vector<Problem> problems = [] {
    std::vector<Problem> out;
    const std::size_t ps[] = {4, 6, 8, 12};
    const double lambdas[] = {0.1, 0.3};
    for (std::size_t k = 0; k < 20; ++k) {
      const std::size_t p = ps[k % 4];
      const double lambda = lambdas[(k / 4) % 2];
      const auto x = prepare_data(sample_mvn(ar2_precision(p), 5 * p, 1000 + k), PenaltyScale::Correlation);
      GramMatrixd gram = compute_gram(x);
      const double penalty = objective_lambda(lambda, gram.n(), PenaltyScale::Correlation);
      out.push_back(Problem{p, lambda, std::move(gram), penalty});
    }
    return out;
  }();
  return problems;
}

SolverConfig<double> config(double penalty, double tol, std::size_t workers = 1) {
  SolverConfig<double> c;
  c.lambda = penalty;
  c.delta_tol = tol;
  c.workers = workers;
  return c;
}

bool monotone(const std::vector<double>& trace) {
  for (std::size_t t = 1; t < trace.size(); ++t)
    if (trace[t] > trace[t - 1] + 1e-9) return false;
  return true;
}

// fits produced by criteria 4 and 6, checked again by 7
std::vector<std::vector<double>> traces;

// ---------------------------------------------------------------------------

Verdict schedule_minimality() {
  const auto start = Clock::now();
  const std::size_t expected[] = {3, 5, 5, 7};
  std::ostringstream d;
  bool ok = true;
  for (std::size_t p = 4; p <= 7; ++p) {
    const std::size_t chromatic = brute_force_chromatic_index(p);
    const std::size_t rounds = build_circle_schedule(p).nonempty_rounds();
    ok = ok && chromatic == expected[p - 4] && rounds == chromatic;
    d << "p=" << p << ": chi'=" << chromatic << " rounds=" << rounds << "; ";
  }
  const double elapsed = seconds_since(start);
  ok = ok && elapsed < 60;
  d << "time " << fmt(elapsed) << "s";
  return verdict(ok, d.str());
}

Verdict round_anchor() {
  const auto s = build_circle_schedule(6);
  std::set<std::pair<std::size_t, std::size_t>> first;
  for (const auto& e : s.rounds().at(0)) first.emplace(e.r + 1, e.s + 1);
  std::set<IndexPair> all;
  std::size_t total = 0;
  for (const auto& round : s.rounds()) {
    total += round.size();
    all.insert(round.begin(), round.end());
  }
  const bool anchor = first == std::set<std::pair<std::size_t, std::size_t>>{{1, 6}, {2, 5}, {3, 4}};
  const bool ok = anchor && s.rounds().size() == 5 && total == 15 && all.size() == 15 && validate_schedule(s).ok;
  return verdict(ok, std::string("round 1 ") + (anchor ? "= {16,25,34}" : "differs") + ", " +
                         std::to_string(s.rounds().size()) + " rounds, " + std::to_string(all.size()) +
                         " distinct of " + std::to_string(total) + " pairs");
}

Verdict round_safety() {
  const auto start = Clock::now();
  std::size_t checked = 0;
  auto disjoint = [](const std::vector<Cell>& a, const std::vector<Cell>& b) {
    std::vector<Cell> both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    return both.empty();
  };
  for (std::size_t p = 2; p <= 32; ++p) {
    for (const auto& round : build_circle_schedule(p).active_rounds()) {
      std::vector<CellSets> sets;
      for (const auto& e : round) sets.push_back(read_write_sets(p, e));
      for (std::size_t i = 0; i < sets.size(); ++i) {
        if (!disjoint(sets[i].read, sets[i].write)) return verdict(false, "self overlap at p=" + std::to_string(p));
        for (std::size_t j = 0; j < sets.size(); ++j) {
          if (i == j) continue;
          ++checked;
          if (!disjoint(sets[i].write, sets[j].read) || !disjoint(sets[i].write, sets[j].write))
            return verdict(false, "conflict at p=" + std::to_string(p));
        }
      }
    }
  }
  const double elapsed = seconds_since(start);
  return verdict(elapsed < 60, std::to_string(checked) + " ordered pairs disjoint, p=2..32, time " + fmt(elapsed) + "s");
}

Verdict cd_pcd_oracle() {
  const auto start = Clock::now();
  double worst = 0;
  std::size_t edge_mismatch = 0;
  std::size_t unconverged = 0;
  std::size_t edges = 0;
  std::size_t possible = 0;
  for (const auto& pr : suite()) {
    const auto cfg = config(pr.penalty, 1e-8);
    const auto cd = cd_fit(pr.gram, cfg);
    const auto pcd = pcd_fit(pr.gram, cfg, build_circle_schedule(pr.p));
    traces.push_back(cd.objective_trace);
    traces.push_back(pcd.objective_trace);
    worst = std::max(worst, max_abs_diff(cd.estimate, pcd.estimate));
    if (cd.edge_count != pcd.edge_count) ++edge_mismatch;
    if (!cd.converged || !pcd.converged) ++unconverged;
    edges += cd.edge_count;
    possible += pr.p * (pr.p - 1) / 2;
  }
  const double elapsed = seconds_since(start);
  const bool ok = worst <= 1e-6 && edge_mismatch == 0 && unconverged == 0 && elapsed < 120;
  return verdict(ok, "20 problems: max-abs " + fmt(worst) + " (tol 1e-6), edge mismatches " +
                         std::to_string(edge_mismatch) + ", unconverged " + std::to_string(unconverged) + ", edges " +
                         std::to_string(edges) + " of " + std::to_string(possible) + ", time " + fmt(elapsed) + "s");
}

Verdict thread_invariance() {
  std::size_t differing = 0;
  for (const auto& pr : suite()) {
    const auto schedule = build_circle_schedule(pr.p);
    const auto base = pcd_fit(pr.gram, config(pr.penalty, 1e-8, 1), schedule);
    for (const std::size_t w : {2u, 8u}) {
      const auto other = pcd_fit(pr.gram, config(pr.penalty, 1e-8, w), schedule);
      if (!(other.estimate == base.estimate) || other.iterations != base.iterations) ++differing;
    }
  }
  return verdict(differing == 0, "workers {1,2,8} on 20 problems: " + std::to_string(differing) + " differing runs");
}

Verdict closed_forms() {
  double off_err = 0;
  double diag_err = 0;
  Rng rng(6, Stream::Test);
  for (std::uint64_t k = 0; k < 100; ++k) {
    const Eigen::Index p = 2 + static_cast<Eigen::Index>(k % 5);
    const auto gram = testing::random_gram(8 + static_cast<Eigen::Index>(k % 13), p, 7000 + k);
    const auto omega = testing::random_estimate(p, 7000 + k);
    const auto r = static_cast<Eigen::Index>(rng.next() % static_cast<std::uint64_t>(p));
    auto s = static_cast<Eigen::Index>(rng.next() % static_cast<std::uint64_t>(p - 1));
    if (s >= r) ++s;
    const double lambda = 3.0 * rng.uniform();
    off_err = std::max(off_err, std::abs(update_offdiagonal(omega, gram, r, s, lambda) -
                                         testing::offdiagonal_oracle(omega, gram, r, s, lambda)));
    const Eigen::Index i = static_cast<Eigen::Index>(k) % p;
    diag_err = std::max(diag_err, std::abs(update_diagonal(omega, gram, i) - testing::diagonal_oracle(omega, gram, i)));
  }

  double worst_violation = 0;
  for (const auto& pr : suite()) {
    const auto cfg = config(pr.penalty, 1e-10);
    const auto cd = cd_fit(pr.gram, cfg);
    const auto pcd = pcd_fit(pr.gram, cfg, build_circle_schedule(pr.p));
    traces.push_back(cd.objective_trace);
    traces.push_back(pcd.objective_trace);
    worst_violation = std::max({worst_violation, check_optimality(cd.estimate, pr.gram, pr.penalty, 1e-4).worst_violation,
                                check_optimality(pcd.estimate, pr.gram, pr.penalty, 1e-4).worst_violation});
  }
  const bool ok = off_err <= 1e-6 && diag_err <= 1e-6 && worst_violation <= 1e-4;
  return verdict(ok, "off-diagonal max err " + fmt(off_err) + ", diagonal max err " + fmt(diag_err) +
                         " (tol 1e-6, 100 instances each); worst subgradient violation " + fmt(worst_violation) +
                         " (tol 1e-4)");
}

Verdict monotone_descent() {
  if (traces.empty()) return verdict(false, "criteria 4 and 6 did not run");
  std::size_t bad = 0;
  std::size_t steps = 0;
  for (const auto& t : traces) {
    steps += t.size();
    if (t.empty() || !monotone(t)) ++bad;
  }
  return verdict(bad == 0, std::to_string(traces.size()) + " fits, " + std::to_string(steps) +
                               " iterations, nonmonotone fits " + std::to_string(bad));
}

Verdict cyclic_reduction() {
  Rng rng(8, Stream::Test);
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t m = 1 + static_cast<std::size_t>(trial) * 4096 / 999;  // spans 1..4097
    std::vector<double> d(m);
    for (auto& v : d) v = rng.normal();
    double scan = 0;
    for (double v : d) scan = std::max(scan, std::abs(v));
    if (cyclic_max_reduce(d) != scan) ++mismatches;
  }
  return verdict(mismatches == 0, "1000 vectors, lengths 1..4097, mismatches " + std::to_string(mismatches));
}

Verdict desk_timing() {
  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
  bench::BenchConfig cfg;
  cfg.ns = {500};
  cfg.ps = {1000};
  cfg.lambdas = {0.3};
  cfg.replicates = 3;
  cfg.workers = cores;
  const auto start = Clock::now();
  const auto report = bench::run_bench(cfg);
  const double elapsed = seconds_since(start);
  const auto& cell = report.cells.at(0);
  std::string detail = "p=1000 n=500 lambda=0.3, 3 reps, " + std::to_string(cores) + " workers: CD " +
                       fmt(cell.cd.time_mean) + "s, PCD " + fmt(cell.pcd.time_mean) + "s, speedup " +
                       fmt(cell.speedup) + ", time " + fmt(elapsed) + "s";
  if (!cell.failures.empty()) return verdict(false, detail + ", failure: " + cell.failures.front());
  if (cores < 4) return {Outcome::Skip, detail + " (needs >= 4 hardware threads)"};
  return verdict(cell.speedup >= 1.0 && elapsed < 900, detail + (cell.speedup >= 2.0 ? "" : " (below expected 2.0)"));
}

Verdict iteration_sanity() {
  std::ostringstream d;
  bool ok = true;
  const auto truth = ar2_precision(200);
  const auto schedule = build_circle_schedule(200);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto gram = compute_gram(prepare_data(sample_mvn(truth, 200, seed), PenaltyScale::Correlation));
    auto cfg = config(objective_lambda(0.3, gram.n(), PenaltyScale::Correlation), 1e-5,
                      std::max(1u, std::thread::hardware_concurrency()));
    cfg.track_objective = false;
    const auto fit = pcd_fit(gram, cfg, schedule);
    ok = ok && fit.converged && fit.iterations >= 5 && fit.iterations <= 60;
    d << (seed > 1 ? ", " : "") << fit.iterations << (fit.converged ? "" : " (not converged)");
  }
  return verdict(ok, "AR(2) p=n=200 lambda=0.3 iterations: " + d.str() + " (band 5..60)");
}

Verdict generators() {
  const auto start = Clock::now();
  std::ostringstream d;
  bool ok = true;

  const auto ar = ar2_precision(4);
  const auto& w = ar.omega_true;
  const bool band = w(0, 1) == 0.45 && w(1, 2) == 0.45 && w(2, 3) == 0.45 && w(0, 2) == 0.4 && w(1, 3) == 0.4 &&
                    w(0, 3) == 0.0 && w(1, 0) == 0.45 && ar2_precision(500).support.size() == 997;
  ok = ok && band;
  d << "AR(2) bands " << (band ? "ok" : "wrong");

  std::size_t floor_violations = 0;
  std::size_t not_pd = 0;
  for (const std::size_t p : {50u, 200u}) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      const auto sf = scale_free_precision(p, 2.3, seed);
      for (const auto& e : sf.support)
        if (std::abs(sf.omega_true(static_cast<Eigen::Index>(e.r), static_cast<Eigen::Index>(e.s))) < 0.1)
          ++floor_violations;
      if (Eigen::LLT<Eigen::MatrixXd>(sf.omega_true.matrix()).info() != Eigen::Success) ++not_pd;
    }
  }
  ok = ok && floor_violations == 0 && not_pd == 0;
  d << "; scale-free floor violations " << floor_violations << ", not PD " << not_pd << " of 40";

  auto covariance = [](const DataMatrixd& x) {
    const Eigen::MatrixXd c = x.values().rowwise() - x.values().colwise().mean();
    return Eigen::MatrixXd(c.transpose() * c / static_cast<double>(x.samples() - 1));
  };
  const TruthModel identity{TruthKind::AR2, 0.0, 0, PrecisionEstimated::identity(3), {}};
  const double cov_err =
      (covariance(sample_mvn(identity, 10000, 11)) - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff();
  const auto ar5 = ar2_precision(5);
  const double prec_err =
      (covariance(sample_mvn(ar5, 100000, 12)).inverse() - ar5.omega_true.matrix()).cwiseAbs().maxCoeff();
  ok = ok && cov_err <= 0.05 && prec_err <= 0.1;
  d << "; MVN cov err " << fmt(cov_err) << " (tol 0.05), AR(2) precision err " << fmt(prec_err) << " (tol 0.1)";

  const double elapsed = seconds_since(start);
  ok = ok && elapsed < 300;
  d << "; time " << fmt(elapsed) << "s";
  return verdict(ok, d.str());
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  std::vector<int> skip;
  app.add_option("--only", only, "Run only these criteria")->delimiter(',');
  app.add_option("--skip", skip, "Do not run these criteria")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "schedule minimality", schedule_minimality},
      {2, "p = 6 round anchor", round_anchor},
      {3, "round safety", round_safety},
      {4, "CD equals PCD", cd_pcd_oracle},
      {5, "thread invariance", thread_invariance},
      {6, "closed-form correctness", closed_forms},
      {7, "monotone descent", monotone_descent},
      {8, "cyclic reduction", cyclic_reduction},
      {9, "desk-scale timing", desk_timing},
      {10, "iteration-count sanity", iteration_sanity},
      {11, "generators", generators},
  };

  std::set<int> selected;
  for (const auto& c : criteria) {
    const bool wanted = only.empty() || std::find(only.begin(), only.end(), c.id) != only.end();
    const bool dropped = std::find(skip.begin(), skip.end(), c.id) != skip.end();
    if (wanted && !dropped) selected.insert(c.id);
  }
  // 7 re-checks the traces recorded by 4 and 6
  if (selected.contains(7)) {
    selected.insert(4);
    selected.insert(6);
  }

  int failed = 0;
  int skipped = 0;
  int passed = 0;
  for (const auto& c : criteria) {
    if (!selected.contains(c.id)) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = verdict(false, std::string("exception: ") + e.what());
    }
    const char* tag = v.outcome == Outcome::Pass ? "PASS" : v.outcome == Outcome::Skip ? "SKIP" : "FAIL";
    std::printf("[%s] %2d %s: %s\n", tag, c.id, c.name, v.detail.c_str());
    std::fflush(stdout);
    (v.outcome == Outcome::Pass ? passed : v.outcome == Outcome::Skip ? skipped : failed)++;
  }
  std::printf("%d passed, %d failed, %d skipped\n", passed, failed, skipped);
  if (failed > 0) return 1;
  if (passed == 0 && skipped > 0) return 77;
  return 0;
}
