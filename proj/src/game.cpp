#include "polar/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "polar/errors.hpp"
#include "polar/parallel.hpp"

namespace polar {

std::string_view to_string(PayoffRule rule) {
  return rule == PayoffRule::point ? "point" : "cell_average";
}

PayoffRule payoff_rule_from_string(std::string_view name) {
  if (name == "point") return PayoffRule::point;
  if (name == "cell_average") return PayoffRule::cell_average;
  throw ConfigError("unknown payoff rule: " + std::string(name));
}

std::string_view to_string(GameSolverKind kind) {
  return kind == GameSolverKind::fictitious_play ? "fictitious_play" : "simplex";
}

GameSolverKind game_solver_from_string(std::string_view name) {
  if (name == "fictitious_play") return GameSolverKind::fictitious_play;
  if (name == "simplex") return GameSolverKind::simplex;
  throw ConfigError("unknown game solver: " + std::string(name));
}

PayoffMatrix PayoffMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) throw DomainError("payoff matrix must be non-empty");
  PayoffMatrix m;
  m.rows = rows.size();
  m.cols = rows.front().size();
  m.entries.reserve(m.rows * m.cols);
  for (const auto& r : rows) {
    if (r.size() != m.cols) throw DomainError("payoff matrix rows must have equal length");
    for (double v : r) {
      if (!std::isfinite(v)) throw DomainError("payoff entries must be finite");
      m.entries.push_back(v);
    }
  }
  return m;
}

namespace {

std::size_t default_cell_refinement(const SetModel& set) {
  switch (set.chart_dim()) {
    case 1: return 64;
    case 2: return 8;
    default: return 3;
  }
}

// Entry for a single pair, applying the diagonal policy.
double pair_value(const KernelSpec& kernel, Vec3 x, Vec3 y, double cap, bool allow_cap,
                  bool& capped) {
  const double t = distance(x, y);
  if (t == 0.0 && kernel.unbounded()) {
    if (!allow_cap)
      throw ConstructionError(
          "diagonal infinity: a support node coincides with a constraint node under an "
          "unbounded kernel");
    capped = true;
    return cap;
  }
  return t == 0.0 ? 1.0 : kernel_value(kernel, t);
}

// Splits every sub-mesh node of a 1-dimensional chart between the two
// support nodes around it with linear (hat) weights. Support nodes of one
// component are consecutive and equally spaced in the chart; circles wrap,
// and on intervals the stretch past the last node belongs to it alone.
void hat_assignment(const SetModel& set, const Mesh& support, const Mesh& fine,
                    std::vector<std::vector<std::pair<std::size_t, double>>>& members) {
  std::size_t begin = 0;
  while (begin < support.size()) {
    const int comp = support.charts[begin].component;
    std::size_t end = begin;
    while (end < support.size() && support.charts[end].component == comp) ++end;
    const std::size_t n = end - begin;
    const bool periodic = chart_component(set, comp).kind == SetKind::circle;
    const double u0 = support.charts[begin].u[0];
    const double h = n > 1 ? support.charts[begin + 1].u[0] - u0 : 1.0;
    for (std::size_t k = 0; k < fine.size(); ++k) {
      if (fine.charts[k].component != comp) continue;
      if (n == 1) {
        members[begin].push_back({k, 1.0});
        continue;
      }
      const double p = (fine.charts[k].u[0] - u0) / h;
      auto lo = static_cast<std::ptrdiff_t>(std::floor(p));
      double frac = p - static_cast<double>(lo);
      std::size_t a = 0;
      std::size_t b = 0;
      if (periodic) {
        const auto nn = static_cast<std::ptrdiff_t>(n);
        a = static_cast<std::size_t>(((lo % nn) + nn) % nn);
        b = (a + 1) % n;
      } else if (lo < 0) {
        a = b = 0;
        frac = 0.0;
      } else if (static_cast<std::size_t>(lo) + 1 >= n) {
        a = b = n - 1;
        frac = 0.0;
      } else {
        a = static_cast<std::size_t>(lo);
        b = a + 1;
      }
      if (1.0 - frac > 0.0) members[begin + a].push_back({k, 1.0 - frac});
      if (frac > 0.0) members[begin + b].push_back({k, frac});
    }
    begin = end;
  }
}

}  // namespace

PayoffMatrix build_payoff(const KernelSpec& kernel, const SetModel& set,
                          std::size_t support_resolution, std::size_t constraint_resolution,
                          const PayoffOptions& options) {
  if (support_resolution < 2 || constraint_resolution < 2)
    throw ResolutionError("payoff resolutions must be at least 2");
  const Mesh support = make_mesh(set, support_resolution, 0.0);
  const Mesh constraint =
      make_mesh(set, constraint_resolution, options.coincident_meshes ? 0.0 : 0.5);

  // The inf runs over the closed set; interval meshes miss the upper
  // endpoint and the offset mesh misses both. An endpoint that is itself a
  // support node (point rule, lower end) is already covered by the diagonal.
  std::vector<Vec3> cnodes = constraint.nodes;
  if (!options.coincident_meshes) {
    for (const Vec3& e : interval_endpoints(set)) {
      const bool on_support = options.rule == PayoffRule::point &&
                              std::find(support.nodes.begin(), support.nodes.end(), e) != support.nodes.end();
      if (!on_support) cnodes.push_back(e);
    }
  }

  PayoffMatrix m;
  m.rows = support.size();
  m.cols = cnodes.size();
  m.support_nodes = support.nodes;
  m.constraint_nodes = cnodes;
  m.rule = options.rule;
  m.entries.assign(m.rows * m.cols, 0.0);
  const double cap = kernel.unbounded() ? kernel_value(kernel, 0.5 * support.spacing) : 1.0;
  std::vector<char> capped(m.rows, 0);

  if (options.rule == PayoffRule::point) {
    parallel_for(m.rows, 0, [&](std::size_t i) {
      bool c = false;
      for (std::size_t j = 0; j < m.cols; ++j)
        m.entries[i * m.cols + j] =
            pair_value(kernel, support.nodes[i], cnodes[j], cap, options.cap_diagonal, c);
      capped[i] = c;
    });
  } else {
    const std::size_t q =
        options.cell_refinement ? options.cell_refinement : default_cell_refinement(set);
    const Mesh fine =
        make_mesh(set, support_resolution * q, options.coincident_meshes ? 0.0 : 0.25);
    // members[i] lists (sub-mesh node, share of its weight) for support node i.
    std::vector<std::vector<std::pair<std::size_t, double>>> members(m.rows);
    if (set.chart_dim() == 1) {
      hat_assignment(set, support, fine, members);
    } else {
      // Voronoi assignment of sub-mesh nodes to support nodes of the same component.
      std::vector<std::size_t> owner(fine.size());
      parallel_for(fine.size(), 0, [&](std::size_t k) {
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t i = 0; i < support.size(); ++i) {
          if (support.charts[i].component != fine.charts[k].component) continue;
          const double d = distance(fine.nodes[k], support.nodes[i]);
          if (d < best) {
            best = d;
            arg = i;
          }
        }
        owner[k] = arg;
      });
      for (std::size_t k = 0; k < fine.size(); ++k) members[owner[k]].push_back({k, 1.0});
    }
    for (std::size_t i = 0; i < m.rows; ++i) {
      if (members[i].empty()) {
        // A cell that caught no sub-mesh node falls back to its point mass.
        m.cell_nodes.push_back(support.nodes[i]);
        m.cell_weights.push_back(1.0);
        m.cell_owner.push_back(i);
        continue;
      }
      double total = 0.0;
      for (const auto& [k, share] : members[i]) total += share * fine.weights[k];
      for (const auto& [k, share] : members[i]) {
        m.cell_nodes.push_back(fine.nodes[k]);
        m.cell_weights.push_back(share * fine.weights[k] / total);
        m.cell_owner.push_back(i);
      }
    }
    std::vector<std::size_t> first(m.rows + 1, 0);
    for (std::size_t owner_i : m.cell_owner) ++first[owner_i + 1];
    for (std::size_t i = 0; i < m.rows; ++i) first[i + 1] += first[i];

    parallel_for(m.rows, 0, [&](std::size_t i) {
      bool c = false;
      for (std::size_t j = 0; j < m.cols; ++j) {
        double sum = 0.0;
        for (std::size_t k = first[i]; k < first[i + 1]; ++k)
          sum += m.cell_weights[k] * pair_value(kernel, m.cell_nodes[k], cnodes[j], cap,
                                                options.cap_diagonal, c);
        m.entries[i * m.cols + j] = sum;
      }
      capped[i] = c;
    });
  }
  m.cap_applied = std::any_of(capped.begin(), capped.end(), [](char c) { return c != 0; });
  return m;
}

namespace {

void check_game(const PayoffMatrix& m) {
  if (m.rows == 0 || m.cols == 0 || m.entries.size() != m.rows * m.cols)
    throw DomainError("malformed payoff matrix");
  for (double v : m.entries)
    if (!std::isfinite(v)) throw DomainError("payoff entries must be finite");
}

void fill_bounds(const PayoffMatrix& m, GameSolution& g) {
  g.lower = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < m.cols; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows; ++i) s += g.weights[i] * m(i, j);
    g.lower = std::min(g.lower, s);
  }
  g.upper = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) s += g.column_weights[j] * m(i, j);
    g.upper = std::max(g.upper, s);
  }
  g.duality_gap = std::max(0.0, g.upper - g.lower);
}

std::vector<double> normalized(const std::vector<std::size_t>& counts, std::size_t total) {
  std::vector<double> w(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i)
    w[i] = static_cast<double>(counts[i]) / static_cast<double>(total);
  return w;
}

}  // namespace

GameSolution fictitious_play(const PayoffMatrix& m, std::size_t max_iters, double gap_tol) {
  check_game(m);
  if (!(gap_tol > 0.0)) throw DomainError("gap_tol must be positive");
  const std::size_t rows = m.rows;
  const std::size_t cols = m.cols;
  std::vector<double> transposed(rows * cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) transposed[j * rows + i] = m(i, j);

  // row_gain[i] = sum_j col_count[j] M[i][j], col_loss[j] = sum_i row_count[i] M[i][j].
  std::vector<double> row_gain(rows, 0.0);
  std::vector<double> col_loss(cols, 0.0);
  std::vector<std::size_t> row_count(rows, 0);
  std::vector<std::size_t> col_count(cols, 0);
  std::vector<std::size_t> best_rows;
  std::vector<std::size_t> best_cols;
  double best_lower = -std::numeric_limits<double>::infinity();
  double best_upper = std::numeric_limits<double>::infinity();
  std::size_t best_rows_t = 1;
  std::size_t best_cols_t = 1;

  std::size_t next_row = 0;
  std::size_t iters = 0;
  bool converged = false;
  while (iters < std::max<std::size_t>(max_iters, 1)) {
    ++iters;
    ++row_count[next_row];
    const double* mrow = &m.entries[next_row * cols];
    std::size_t next_col = 0;
    for (std::size_t j = 0; j < cols; ++j) {
      col_loss[j] += mrow[j];
      if (col_loss[j] < col_loss[next_col]) next_col = j;
    }
    const double lower = col_loss[next_col] / static_cast<double>(iters);
    if (lower > best_lower) {
      best_lower = lower;
      best_rows = row_count;
      best_rows_t = iters;
    }

    ++col_count[next_col];
    const double* mcol = &transposed[next_col * rows];
    next_row = 0;
    for (std::size_t i = 0; i < rows; ++i) {
      row_gain[i] += mcol[i];
      if (row_gain[i] > row_gain[next_row]) next_row = i;
    }
    const double upper = row_gain[next_row] / static_cast<double>(iters);
    if (upper < best_upper) {
      best_upper = upper;
      best_cols = col_count;
      best_cols_t = iters;
    }
    if (best_upper - best_lower <= gap_tol) {
      converged = true;
      break;
    }
  }

  GameSolution g;
  g.weights = normalized(best_rows, best_rows_t);
  g.column_weights = normalized(best_cols, best_cols_t);
  g.lower = best_lower;
  g.upper = best_upper;
  g.duality_gap = std::max(0.0, best_upper - best_lower);
  g.value = 0.5 * (best_lower + best_upper);
  g.iterations = iters;
  g.converged = converged;
  return g;
}

GameSolution lp_exact_small(const PayoffMatrix& m) {
  check_game(m);
  constexpr std::size_t kMaxDim = 200;
  if (m.rows > kMaxDim || m.cols > kMaxDim)
    throw SizeError("lp_exact_small handles at most 200 x 200, got " + std::to_string(m.rows) +
                    " x " + std::to_string(m.cols));
  const std::size_t rows = m.rows;
  const std::size_t cols = m.cols;
  const double shift = 1.0 - *std::min_element(m.entries.begin(), m.entries.end());

  // Tableau for  max sum(q)  s.t.  (M + shift) q + s = 1.
  // Columns: q_0..q_{n-1}, s_0..s_{m-1}, rhs. Last row holds reduced costs.
  const std::size_t width = cols + rows + 1;
  const std::size_t rhs = width - 1;
  std::vector<double> t((rows + 1) * width, 0.0);
  auto at = [&](std::size_t r, std::size_t c) -> double& { return t[r * width + c]; };
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) at(i, j) = m(i, j) + shift;
    at(i, cols + i) = 1.0;
    at(i, rhs) = 1.0;
  }
  for (std::size_t j = 0; j < cols; ++j) at(rows, j) = 1.0;
  std::vector<std::size_t> basis(rows);
  for (std::size_t i = 0; i < rows; ++i) basis[i] = cols + i;

  constexpr double kEps = 1e-12;
  constexpr std::size_t kDegenerateStreak = 50;
  std::size_t streak = 0;
  bool bland = false;
  std::size_t pivots = 0;
  const std::size_t pivot_cap = 1000 * (rows + cols);
  while (true) {
    std::size_t enter = width;
    double best = kEps;
    for (std::size_t c = 0; c < rhs; ++c) {
      const double rc = at(rows, c);
      if (rc > best) {
        enter = c;
        if (bland) break;
        best = rc;
      }
    }
    if (enter == width) break;

    std::size_t leave = rows;
    double ratio = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows; ++i) {
      const double a = at(i, enter);
      if (a <= kEps) continue;
      const double r = at(i, rhs) / a;
      if (r < ratio - 1e-15 || (std::abs(r - ratio) <= 1e-15 && basis[i] < basis[leave])) {
        ratio = r;
        leave = i;
      }
    }
    // Bounded: every column of the shifted matrix is strictly positive.
    if (leave == rows) throw DomainError("simplex found an unbounded direction");

    streak = ratio <= kEps ? streak + 1 : 0;
    if (streak > kDegenerateStreak) bland = true;

    const double p = at(leave, enter);
    for (std::size_t c = 0; c < width; ++c) at(leave, c) /= p;
    for (std::size_t r = 0; r <= rows; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < width; ++c) at(r, c) -= f * at(leave, c);
    }
    basis[leave] = enter;
    if (++pivots > pivot_cap) throw DomainError("simplex exceeded its pivot budget");
  }

  std::vector<double> q(cols, 0.0);
  for (std::size_t i = 0; i < rows; ++i)
    if (basis[i] < cols) q[basis[i]] = std::max(0.0, at(i, rhs));
  std::vector<double> p(rows, 0.0);
  for (std::size_t i = 0; i < rows; ++i) p[i] = std::max(0.0, -at(rows, cols + i));
  double sq = 0.0;
  for (double v : q) sq += v;
  double sp = 0.0;
  for (double v : p) sp += v;

  GameSolution g;
  g.weights.resize(rows);
  g.column_weights.resize(cols);
  for (std::size_t i = 0; i < rows; ++i) g.weights[i] = p[i] / sp;
  for (std::size_t j = 0; j < cols; ++j) g.column_weights[j] = q[j] / sq;
  fill_bounds(m, g);
  g.value = 1.0 / sq - shift;
  g.iterations = pivots;
  g.converged = g.duality_gap <= 1e-9;
  return g;
}

namespace {

// Equalizer solution on rows R x columns C, or nothing if a strategy comes
// out negative or the system is numerically singular.
void normalize(std::vector<double>& v) {
  double total = 0.0;
  for (double x : v) total += x;
  for (double& x : v) x /= total;
}

// Square supports: both players equalize through one LU. Rectangular
// supports solve [M_RC^T | -1; 1^T | 0] and its transpose in the least
// squares sense; the answer is kept only if both residuals vanish.
std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>> equalizer_pair(const Eigen::MatrixXd& a) {
  const auto r = a.rows();
  const auto c = a.cols();
  if (r == c) {
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(r);
    Eigen::VectorXd col = lu.solve(ones);
    Eigen::VectorXd row = lu.transpose().solve(ones);
    if (!col.allFinite() || !row.allFinite()) return std::nullopt;
    if ((a * col - ones).lpNorm<Eigen::Infinity>() > 1e-9) return std::nullopt;
    const double sc = col.sum();
    const double sr = row.sum();
    if (!(sc > 0.0) || !(sr > 0.0)) return std::nullopt;
    return std::pair{Eigen::VectorXd(row / sr), Eigen::VectorXd(col / sc)};
  }
  const auto solve = [](const Eigen::MatrixXd& b) -> std::optional<Eigen::VectorXd> {
    // b is (equations x strategies); unknowns are the strategy and the value.
    const auto n = b.cols();
    Eigen::MatrixXd sys = Eigen::MatrixXd::Zero(b.rows() + 1, n + 1);
    sys.topLeftCorner(b.rows(), n) = b;
    sys.col(n).head(b.rows()).setConstant(-1.0);
    sys.row(b.rows()).head(n).setConstant(1.0);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(b.rows() + 1);
    rhs(b.rows()) = 1.0;
    const Eigen::VectorXd x = sys.completeOrthogonalDecomposition().solve(rhs);
    if (!x.allFinite() || (sys * x - rhs).lpNorm<Eigen::Infinity>() > 1e-9) return std::nullopt;
    return Eigen::VectorXd(x.head(n));
  };
  const auto row = solve(a.transpose());
  const auto col = solve(a);
  if (!row || !col) return std::nullopt;
  return std::pair{*row, *col};
}

std::optional<GameSolution> equalize(const PayoffMatrix& m, const std::vector<std::size_t>& R,
                                     const std::vector<std::size_t>& C) {
  const auto kr = static_cast<Eigen::Index>(R.size());
  const auto kc = static_cast<Eigen::Index>(C.size());
  Eigen::MatrixXd a(kr, kc);
  for (Eigen::Index r = 0; r < kr; ++r)
    for (Eigen::Index c = 0; c < kc; ++c) a(r, c) = m(R[static_cast<std::size_t>(r)], C[static_cast<std::size_t>(c)]);
  const auto pair = equalizer_pair(a);
  if (!pair) return std::nullopt;
  const auto& [row, col] = *pair;
  constexpr double kNegTol = 1e-12;
  GameSolution g;
  g.weights.assign(m.rows, 0.0);
  g.column_weights.assign(m.cols, 0.0);
  for (Eigen::Index i = 0; i < kr; ++i) {
    if (row(i) < -kNegTol) return std::nullopt;
    g.weights[R[static_cast<std::size_t>(i)]] = std::max(0.0, row(i));
  }
  for (Eigen::Index j = 0; j < kc; ++j) {
    if (col(j) < -kNegTol) return std::nullopt;
    g.column_weights[C[static_cast<std::size_t>(j)]] = std::max(0.0, col(j));
  }
  normalize(g.weights);
  normalize(g.column_weights);
  fill_bounds(m, g);
  g.value = 0.5 * (g.lower + g.upper);
  return g;
}

std::vector<std::size_t> above(const std::vector<double>& w, double fraction) {
  const double top = *std::max_element(w.begin(), w.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] >= fraction * top && w[i] > 0.0) out.push_back(i);
  return out;
}

// Indices of the k best entries of `score` (smallest if ascending), ties to
// the lower index, returned in increasing index order.
std::vector<std::size_t> best_k(const std::vector<double>& score, std::size_t k, bool ascending) {
  std::vector<std::size_t> idx(score.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return ascending ? score[a] < score[b] : score[a] > score[b];
  });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

}  // namespace

GameSolution polish_equalizer(const PayoffMatrix& m, const GameSolution& start) {
  check_game(m);
  constexpr std::size_t kMaxSupport = 1024;
  std::vector<double> col_payoff(m.cols, 0.0);  // (Mᵀw)_j
  std::vector<double> row_payoff(m.rows, 0.0);  // (My)_i
  for (std::size_t i = 0; i < m.rows; ++i)
    for (std::size_t j = 0; j < m.cols; ++j) {
      col_payoff[j] += start.weights[i] * m(i, j);
      row_payoff[i] += start.column_weights[j] * m(i, j);
    }

  GameSolution best = start;
  for (double fraction : {0.2, 0.05, 0.01, 1e-3}) {
    const auto rows_by_weight = above(start.weights, fraction);
    const auto cols_by_weight = above(start.column_weights, fraction);
    const std::pair<std::vector<std::size_t>, std::vector<std::size_t>> guesses[] = {
        {rows_by_weight,
         best_k(col_payoff, std::min(rows_by_weight.size(), m.cols), true)},
        {best_k(row_payoff, std::min(cols_by_weight.size(), m.rows), false), cols_by_weight},
        {rows_by_weight, cols_by_weight}};
    for (const auto& [R, C] : guesses) {
      if (R.empty() || C.empty() || std::max(R.size(), C.size()) > kMaxSupport) continue;
      const auto g = equalize(m, R, C);
      if (g && g->duality_gap < best.duality_gap) {
        best = *g;
        best.iterations = start.iterations;
        best.converged = start.converged || g->duality_gap <= 1e-9;
        best.polished = true;
      }
    }
  }
  return best;
}

GameSolution solve_game(const PayoffMatrix& m, const GameConfig& cfg) {
  if (cfg.solver == GameSolverKind::simplex) return lp_exact_small(m);
  const GameSolution fp = fictitious_play(m, cfg.max_iters, cfg.gap_tol);
  return cfg.polish ? polish_equalizer(m, fp) : fp;
}

ContinuousResult continuous_polarization(const KernelSpec& kernel, const SetModel& set,
                                         std::size_t resolution, const GameConfig& cfg) {
  if (resolution < 2) throw ResolutionError("resolution must be at least 2");
  const std::size_t factor =
      cfg.constraint_factor ? cfg.constraint_factor : (set.chart_dim() <= 2 ? 2 : 1);
  const PayoffMatrix m = build_payoff(kernel, set, resolution, factor * resolution, cfg.payoff);

  ContinuousResult out;
  out.game = solve_game(m, cfg);
  out.t_estimate = out.game.value;
  out.cap_applied = m.cap_applied;

  double kept = 0.0;
  std::vector<double> w(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    if (out.game.weights[i] >= cfg.prune) {
      w[i] = out.game.weights[i];
      kept += w[i];
    }
  }
  for (std::size_t i = 0; i < m.rows; ++i) {
    if (w[i] <= 0.0) continue;
    out.measure.atoms.push_back(m.support_nodes[i]);
    out.measure.weights.push_back(w[i] / kept);
  }
  out.support_size = out.measure.size();

  if (m.rule == PayoffRule::cell_average) {
    for (std::size_t k = 0; k < m.cell_nodes.size(); ++k) {
      const double wi = w[m.cell_owner[k]];
      if (wi <= 0.0) continue;
      out.smeared.atoms.push_back(m.cell_nodes[k]);
      out.smeared.weights.push_back(wi / kept * m.cell_weights[k]);
    }
  } else {
    out.smeared = out.measure;
  }

  std::vector<Vec3> check = make_mesh(set, cfg.certify_factor * resolution, 0.5).nodes;
  for (const Vec3& e : interval_endpoints(set)) check.push_back(e);
  std::vector<Extended> values(check.size());
  parallel_for(check.size(), 0,
               [&](std::size_t j) { values[j] = potential(kernel, out.smeared, check[j]); });
  Extended lowest = Extended::infinity();
  for (const Extended& v : values) lowest = min(lowest, v);
  out.certified = lowest.to_double();
  return out;
}

nlohmann::json to_json(const GameSolution& g) {
  return {{"value", g.value},
          {"lower", g.lower},
          {"upper", g.upper},
          {"duality_gap", g.duality_gap},
          {"iterations", g.iterations},
          {"converged", g.converged},
          {"polished", g.polished},
          {"weights", g.weights}};
}

}  // namespace polar
