#include "nlod/design.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>
#include <vector>

#include "nlod/errors.hpp"

namespace nlod {

namespace {

/// Cell indices ranked by |u_i| ascending, ties by ascending index.
std::vector<int> rank_by_magnitude(const Eigen::VectorXd& u) {
  std::vector<int> order(static_cast<std::size_t>(u.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return std::abs(u[a]) < std::abs(u[b]); });
  return order;
}

/// Number of obstacle cells for a binary design, with the integrality guard.
long long binary_cardinality(double alpha, int cells) {
  const double an = alpha * cells;
  const long long m = std::llround(an);
  if (std::abs(an - static_cast<double>(m)) > 1e-9) {
    const long long lo = static_cast<long long>(std::floor(an));
    std::ostringstream msg;
    msg << "binary designs require alpha * N to be an integer: alpha = " << alpha
        << " with N = " << cells << " gives alpha * N = " << an
        << "; adjust N or alpha (nearest feasible alpha: " << static_cast<double>(lo) / cells
        << " or " << static_cast<double>(lo + 1) / cells << ")";
    throw ValidationError(msg.str());
  }
  if (m < 1 || m > cells - 1) {
    throw ValidationError("alpha * N must lie strictly between 0 and N for a binary design");
  }
  return m;
}

/// Relative tie band used when comparing design objectives.
double tie_band(double a, double b) {
  return 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

bool strictly_better(double lam, double best) { return lam < best - tie_band(lam, best); }

bool tied(double lam, double best) { return std::abs(lam - best) <= tie_band(lam, best); }

bool lex_less(const std::vector<int>& a, const std::vector<int>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

bool values_lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(),
                                      b.data() + b.size());
}

/// (lambda, design) order: smaller lambda wins; lambdas within the tie band
/// fall back to the design whose mass sits on lexicographically smaller cell
/// indices — for values vectors that is the lexicographically LARGER one
/// (leading ones beat leading zeros), matching the oracle's cell-index order.
bool better_pair(double lam, const DesignVector& d, double best_lam, const DesignVector& best_d) {
  if (strictly_better(lam, best_lam)) return true;
  if (tied(lam, best_lam) && values_lex_less(best_d.values, d.values)) return true;
  return false;
}

double max_abs_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

using EvalFn = std::function<Extremal(const DesignVector&)>;

/// Running best (lambda, extremal, design) under the better_pair order.
struct Incumbent {
  bool has = false;
  double lambda = 0.0;
  Extremal extremal;
  DesignVector design;

  void consider(const DesignVector& d, const Extremal& e) {
    if (!has || better_pair(e.lambda, d, lambda, design)) {
      has = true;
      lambda = e.lambda;
      extremal = e;
      design = d;
    }
  }
};

/// Strict-improvement single-swap descent on a binary incumbent. Each round
/// scans every (obstacle cell out, free cell in) exchange, commits the best
/// strict improvement, and repeats until no exchange improves the objective.
/// Returns the number of committed swaps; every committed objective value is
/// appended to `trace`.
int swap_polish(Incumbent& best, const EvalFn& eval, const Grid& grid, std::vector<double>& trace) {
  const int N = grid.size();
  int commits = 0;
  bool improved = true;
  while (improved) {
    improved = false;
    const std::vector<int> inside = design_cells(best.design);
    std::vector<char> is_inside(static_cast<std::size_t>(N), 0);
    for (int c : inside) is_inside[static_cast<std::size_t>(c)] = 1;

    Incumbent round;
    for (int drop : inside) {
      for (int add = 0; add < N; ++add) {
        if (is_inside[static_cast<std::size_t>(add)]) continue;
        std::vector<int> cells;
        cells.reserve(inside.size());
        for (int c : inside) {
          if (c != drop) cells.push_back(c);
        }
        cells.push_back(add);
        std::sort(cells.begin(), cells.end());
        const DesignVector cand = design_from_cells(cells, grid);
        const Extremal e = eval(cand);
        if (strictly_better(e.lambda, best.lambda)) round.consider(cand, e);
      }
    }
    if (round.has) {
      best.consider(round.design, round.extremal);
      trace.push_back(round.lambda);
      ++commits;
      improved = true;
    }
  }
  return commits;
}

/// Alternation driver shared by the hard and soft optimizers: starting from an
/// already-solved (design, extremal) pair, repeat (bathtub update, re-solve)
/// until the design repeats or the round budget is exhausted. `same` decides
/// design equality; returns rounds run and sets `cycle` when an older design
/// (not the immediate predecessor) reappears.
int alternate(Incumbent& best, DesignVector phi, Extremal e, double alpha, const Grid& grid,
              BathtubMode mode, const EvalFn& eval, int max_rounds,
              const std::function<bool(const Eigen::VectorXd&, const Eigen::VectorXd&)>& same,
              std::vector<double>& trace, bool& cycle) {
  std::vector<Eigen::VectorXd> visited;
  visited.push_back(phi.values);
  int rounds = 0;
  while (rounds < max_rounds) {
    const DesignVector next = bathtub_update(e.u, alpha, grid, mode);
    ++rounds;
    if (same(next.values, visited.back())) break;  // stable design: fixed point reached
    bool seen = false;
    for (const auto& v : visited) {
      if (same(next.values, v)) {
        seen = true;
        break;
      }
    }
    e = eval(next);
    best.consider(next, e);
    trace.push_back(e.lambda);
    visited.push_back(next.values);
    phi = next;
    if (seen) {
      cycle = true;
      break;
    }
  }
  return rounds;
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError("alpha must satisfy 0 < alpha < 1");
  }
}

}  // namespace

DesignVector bathtub_update(const Eigen::VectorXd& u, double alpha, const Grid& grid,
                            BathtubMode mode) {
  const int N = grid.size();
  if (static_cast<int>(u.size()) != N) {
    throw ValidationError("bathtub input length does not match the grid");
  }
  check_alpha(alpha);
  if (!u.allFinite()) {
    throw ValidationError("bathtub input has non-finite entries");
  }

  const std::vector<int> order = rank_by_magnitude(u);
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(N);
  if (mode == BathtubMode::binary) {
    const long long m = binary_cardinality(alpha, N);
    for (long long k = 0; k < m; ++k) phi[order[static_cast<std::size_t>(k)]] = 1.0;
  } else {
    double remaining = alpha * N;  // target mass in cell units
    for (int k = 0; k < N && remaining > 1e-12; ++k) {
      if (remaining >= 1.0 - 1e-12) {
        phi[order[static_cast<std::size_t>(k)]] = 1.0;
        remaining -= 1.0;
      } else {
        phi[order[static_cast<std::size_t>(k)]] = remaining;  // fractional pivot cell
        remaining = 0.0;
      }
    }
  }
  return make_design(phi, grid);
}

DesignResult optimize_hard_model(const EnergyModel& model, const Grid& grid, double alpha,
                                 const OptimizeOptions& opts) {
  const int N = grid.size();
  check_alpha(alpha);
  const long long m = binary_cardinality(alpha, N);
  const EvalFn eval = [&](const DesignVector& A) {
    return solve_hard_model(model, grid, A, opts.solver);
  };

  // Candidate starting designs. The alternation below is stationary at every
  // binary design (the hard extremal vanishes exactly on the obstacle cells
  // and nowhere else), so the search quality comes from this portfolio plus
  // the swap descent.
  std::vector<DesignVector> starts;
  if (opts.initial_design) {
    const DesignVector& d = *opts.initial_design;
    if (!d.binary) throw ValidationError("hard initial design must be binary");
    if (d.size() != N) throw ValidationError("initial design size does not match the grid");
    if (!in_mass_class(d, alpha, grid, 1e-9)) {
      throw ValidationError("initial design mass does not equal alpha * |Omega|");
    }
    starts.push_back(d);
  } else if (opts.multistart) {
    for (int s0 = 0; s0 + static_cast<int>(m) <= N; ++s0) {
      std::vector<int> cells(static_cast<std::size_t>(m));
      std::iota(cells.begin(), cells.end(), s0);
      starts.push_back(design_from_cells(cells, grid));
    }
  } else {
    std::vector<int> cells(static_cast<std::size_t>(m));
    std::iota(cells.begin(), cells.end(), 0);
    starts.push_back(design_from_cells(cells, grid));
  }

  Incumbent best;
  for (const DesignVector& A : starts) best.consider(A, eval(A));

  std::vector<double> trace;
  trace.push_back(best.lambda);
  if (opts.local_search) swap_polish(best, eval, grid, trace);

  const auto cells_equal = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a - b).cwiseAbs().maxCoeff() == 0.0;
  };
  bool cycle = false;
  const int rounds = alternate(best, best.design, best.extremal, alpha, grid, BathtubMode::binary,
                               eval, opts.max_outer_iterations, cells_equal, trace, cycle);

  DesignResult r;
  r.lambda = best.lambda;
  r.extremal = best.extremal;
  r.design = best.design;
  r.outer_iterations = rounds;
  r.objective_trace = std::move(trace);
  r.cycle_detected = cycle;
  return r;
}

DesignResult optimize_hard(const KernelMatrix& kernel, const Grid& grid, double alpha,
                           const OptimizeOptions& opts) {
  return optimize_hard_model(midpoint_model(kernel), grid, alpha, opts);
}

DesignResult optimize_soft_model(const EnergyModel& model, const Grid& grid, double alpha,
                                 double sigma, const OptimizeOptions& opts) {
  const int N = grid.size();
  check_alpha(alpha);
  if (!(sigma > 0.0)) {
    throw ValidationError("sigma must satisfy sigma > 0");
  }
  const EvalFn eval = [&](const DesignVector& phi) {
    return solve_soft_model(model, grid, phi, sigma, opts.solver);
  };

  DesignVector phi;
  if (opts.initial_design) {
    const DesignVector& d = *opts.initial_design;
    if (d.size() != N) throw ValidationError("initial design size does not match the grid");
    if (!in_mass_class(d, alpha, grid, 1e-9)) {
      throw ValidationError("initial design mass does not equal alpha * |Omega|");
    }
    phi = d;
  } else {
    // Constant ranking input: ties resolve by ascending index, so the start is
    // the leading block of cells at the required mass.
    phi = bathtub_update(Eigen::VectorXd::Ones(N), alpha, grid, BathtubMode::relaxed);
  }

  Incumbent best;
  Extremal e0 = eval(phi);
  best.consider(phi, e0);
  std::vector<double> trace;
  trace.push_back(e0.lambda);

  const auto soft_equal = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return max_abs_diff(a, b) <= 1e-12;
  };
  bool cycle = false;
  int rounds = alternate(best, phi, e0, alpha, grid, BathtubMode::relaxed, eval,
                         opts.max_outer_iterations, soft_equal, trace, cycle);

  // Swap descent certifies local optimality among binary neighbors when the
  // instance is small and the incumbent landed on a characteristic function.
  const double an = alpha * N;
  const bool binary_feasible = std::abs(an - std::llround(an)) <= 1e-9;
  if (opts.local_search && binary_feasible && N <= 64 && best.design.binary && !cycle) {
    for (int macro = 0; macro < 20; ++macro) {
      const int commits = swap_polish(best, eval, grid, trace);
      if (commits == 0) break;
      bool cyc = false;
      rounds += alternate(best, best.design, best.extremal, alpha, grid, BathtubMode::relaxed,
                          eval, opts.max_outer_iterations, soft_equal, trace, cyc);
      cycle = cycle || cyc;
      if (!best.design.binary) break;
    }
  }

  DesignResult r;
  r.lambda = best.lambda;
  r.extremal = best.extremal;
  r.design = best.design;
  r.outer_iterations = rounds;
  r.objective_trace = std::move(trace);
  r.cycle_detected = cycle;
  return r;
}

DesignResult optimize_soft(const KernelMatrix& kernel, const Grid& grid, double alpha, double sigma,
                           const OptimizeOptions& opts) {
  return optimize_soft_model(midpoint_model(kernel), grid, alpha, sigma, opts);
}

double oracle_subset_count(int cells, int chosen) {
  if (chosen < 0 || chosen > cells) return 0.0;
  double c = 1.0;
  for (int k = 1; k <= chosen; ++k) {
    c = c * (cells - chosen + k) / k;
    if (c > 1e18) return std::numeric_limits<double>::infinity();
  }
  return c;
}

namespace {

/// Advances `comb` to the next cardinality-|comb| subset of {0..N-1} in
/// lexicographic order; false once the last subset has been visited.
bool next_combination(std::vector<int>& comb, int N) {
  const int m = static_cast<int>(comb.size());
  for (int i = m - 1; i >= 0; --i) {
    if (comb[static_cast<std::size_t>(i)] < N - m + i) {
      ++comb[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < m; ++j) {
        comb[static_cast<std::size_t>(j)] = comb[static_cast<std::size_t>(j - 1)] + 1;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

DesignResult exhaustive_oracle(const KernelMatrix& kernel, const Grid& grid, double alpha,
                               std::optional<double> sigma, int threads,
                               const SolverOptions& solver) {
  const int N = grid.size();
  check_alpha(alpha);
  const long long m = binary_cardinality(alpha, N);
  if (sigma && !(*sigma > 0.0)) {
    throw ValidationError("sigma must satisfy sigma > 0");
  }

  const double count = oracle_subset_count(N, static_cast<int>(m));
  if (!(count <= 1e6)) {
    std::ostringstream msg;
    msg << "exhaustive oracle refused: C(" << N << ", " << m << ") = ";
    if (std::isfinite(count)) {
      msg.precision(0);
      msg << std::fixed << count;
    } else {
      msg << "more than 1e18";
    }
    msg << " subsets exceeds the budget of 1000000";
    throw ValidationError(msg.str());
  }

  const int T = std::max(1, std::min(threads, 64));
  const EnergyModel model = midpoint_model(kernel);

  struct WorkerBest {
    bool has = false;
    double lambda = 0.0;
    std::vector<int> cells;
    Extremal extremal;
    DesignVector design;
  };
  std::vector<WorkerBest> bests(static_cast<std::size_t>(T));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(T));

  // Exact total order for the reduction: lambda ascending, then lexicographic
  // cell indices. The global minimum under a total order is independent of how
  // subsets are partitioned across workers.
  const auto takes = [](double lam, const std::vector<int>& cells, const WorkerBest& b) {
    if (!b.has) return true;
    if (lam < b.lambda) return true;
    return lam == b.lambda && lex_less(cells, b.cells);
  };

  auto worker = [&](int tid) {
    try {
      std::vector<int> comb(static_cast<std::size_t>(m));
      std::iota(comb.begin(), comb.end(), 0);
      long long rank = 0;
      WorkerBest& b = bests[static_cast<std::size_t>(tid)];
      while (true) {
        if (rank % T == tid) {
          const DesignVector D = design_from_cells(comb, grid);
          const Extremal e = sigma ? solve_soft_model(model, grid, D, *sigma, solver)
                                   : solve_hard_model(model, grid, D, solver);
          if (takes(e.lambda, comb, b)) {
            b.has = true;
            b.lambda = e.lambda;
            b.cells = comb;
            b.extremal = e;
            b.design = D;
          }
        }
        if (!next_combination(comb, N)) break;
        ++rank;
      }
    } catch (...) {
      errors[static_cast<std::size_t>(tid)] = std::current_exception();
    }
  };

  if (T == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) pool.emplace_back(worker, t);
    for (auto& th : pool) th.join();
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  const WorkerBest* winner = nullptr;
  for (const auto& b : bests) {
    if (!b.has) continue;
    if (winner == nullptr || takes(b.lambda, b.cells, *winner)) winner = &b;
  }
  if (winner == nullptr) {
    throw ValidationError("exhaustive oracle enumerated no admissible designs");
  }

  DesignResult r;
  r.lambda = winner->lambda;
  r.extremal = winner->extremal;
  r.design = winner->design;
  r.outer_iterations = 0;
  r.objective_trace = {winner->lambda};
  r.cycle_detected = false;
  return r;
}

}  // namespace nlod
