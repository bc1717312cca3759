#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "targetflow/errors.hpp"
#include "targetflow/graph.hpp"
#include "targetflow/mftp.hpp"

// Numeric certification of a driver allocation: a random weighted realization
// of (A, B, C), the output-controllability rank test, Gramian-based minimum
// energy input and an RK4 check that the targets actually reach the origin.

namespace targetflow {

/// Small dense row-major matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  static DenseMatrix column(std::span<const double> v) {
    DenseMatrix m(v.size(), 1);
    std::copy(v.begin(), v.end(), m.data_.begin());
    return m;
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const double> data() const noexcept { return data_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  DenseMatrix transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  DenseMatrix& operator+=(const DenseMatrix& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }

  DenseMatrix& operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
  }

  friend DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
  friend DenseMatrix operator*(DenseMatrix a, double s) { return a *= s; }

  friend DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols_ != b.rows_) throw InvalidInput("matrix product: inner dimensions differ");
    DenseMatrix out(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
      for (std::size_t k = 0; k < a.cols_; ++k) {
        double aik = a(i, k);
        if (aik == 0.0) continue;
        const double* brow = &b.data_[k * b.cols_];
        double* orow = &out.data_[i * out.cols_];
        for (std::size_t j = 0; j < b.cols_; ++j) orow[j] += aik * brow[j];
      }
    }
    return out;
  }

  // Induced 1-norm (max column sum).
  double norm1() const {
    double best = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < rows_; ++r) s += std::abs((*this)(r, c));
      best = std::max(best, s);
    }
    return best;
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](double x) { return std::isfinite(x); });
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  void check_same_shape(const DenseMatrix& o) const {
    if (rows_ != o.rows_ || cols_ != o.cols_) throw InvalidInput("matrix shapes differ");
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline std::vector<double> multiply(const DenseMatrix& a, std::span<const double> x) {
  if (a.cols() != x.size()) throw InvalidInput("matrix-vector product: size mismatch");
  std::vector<double> y(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

inline double norm2(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

struct LtiSystem {
  DenseMatrix a;  // n x n, a(i, j) != 0 iff edge j -> i
  DenseMatrix b;  // n x M
  DenseMatrix c;  // |S| x n
  std::vector<NodeId> targets;

  std::size_t state_dim() const { return a.rows(); }
  std::size_t input_dim() const { return b.cols(); }
  std::size_t output_dim() const { return c.rows(); }
};

/// Weighted realization of g: edge weights uniform on [0.5, 1.5] drawn in edge
/// order, B = 1 at each attachment, C selects the targets.
inline LtiSystem realize_system(const DiGraph& g, const TargetSet& s, const DriverAllocation& alloc,
                                std::uint64_t seed) {
  const std::size_t n = g.node_count();
  if (!s.members().empty() && s.members().back() >= n) throw InvalidInput("target out of range");
  LtiSystem sys;
  sys.a = DenseMatrix(n, n);
  sys.b = DenseMatrix(n, alloc.driver_count);
  sys.c = DenseMatrix(s.size(), n);
  sys.targets.assign(s.members().begin(), s.members().end());

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> weight(0.5, 1.5);
  for (const Edge& e : g.edges()) sys.a(e.head, e.tail) = weight(rng);
  for (const Attachment& at : alloc.attachments) {
    if (at.node >= n || at.driver >= alloc.driver_count) {
      throw InvalidInput("attachment (" + std::to_string(at.driver) + ", " +
                         std::to_string(at.node) + ") out of range");
    }
    sys.b(at.node, at.driver) = 1.0;
  }
  for (std::size_t r = 0; r < s.size(); ++r) sys.c(r, s.members()[r]) = 1.0;
  return sys;
}

/// Numeric rank of [CB, CAB, ..., CA^(n-1)B]. A column contributes a pivot
/// only if its best remaining entry exceeds 1e-9 times the column's largest
/// entry, so the result does not depend on the scale of individual columns.
inline std::size_t kalman_target_rank(const LtiSystem& sys, double rel_tol = 1e-9) {
  const std::size_t n = sys.state_dim();
  const std::size_t m = sys.input_dim();
  const std::size_t p = sys.output_dim();
  if (p == 0 || m == 0 || n == 0) return 0;

  DenseMatrix block(p, n * m);
  DenseMatrix power = sys.b;  // A^k B
  for (std::size_t k = 0; k < n; ++k) {
    DenseMatrix cab = sys.c * power;
    for (std::size_t r = 0; r < p; ++r)
      for (std::size_t j = 0; j < m; ++j) block(r, k * m + j) = cab(r, j);
    if (k + 1 < n) power = sys.a * power;
  }

  std::vector<char> pivoted(p, 0);
  std::size_t rank = 0;
  for (std::size_t col = 0; col < block.cols() && rank < p; ++col) {
    double col_max = 0.0;
    std::size_t best = p;
    double best_abs = 0.0;
    for (std::size_t r = 0; r < p; ++r) {
      double v = std::abs(block(r, col));
      col_max = std::max(col_max, v);
      if (!pivoted[r] && v > best_abs) {
        best_abs = v;
        best = r;
      }
    }
    if (best == p || best_abs <= rel_tol * col_max || best_abs == 0.0) continue;
    pivoted[best] = 1;
    ++rank;
    for (std::size_t r = 0; r < p; ++r) {
      if (r == best) continue;
      double factor = block(r, col) / block(best, col);
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < block.cols(); ++c) block(r, c) -= factor * block(best, c);
    }
  }
  return rank;
}

/// e^A by scaling and squaring: scale until ||A||_1 < 0.5, sum the Taylor
/// series to machine precision, square back.
inline DenseMatrix matrix_exponential(const DenseMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidInput("matrix exponential needs a square matrix");
  if (!a.all_finite()) throw NumericError("matrix exponential: non-finite input");
  const std::size_t n = a.rows();
  int squarings = 0;
  double norm = a.norm1();
  while (norm >= 0.5) {
    norm *= 0.5;
    ++squarings;
  }
  DenseMatrix scaled = a * std::ldexp(1.0, -squarings);
  DenseMatrix result = DenseMatrix::identity(n);
  DenseMatrix term = DenseMatrix::identity(n);
  for (int k = 1; k <= 30; ++k) {
    term = term * scaled;
    term *= 1.0 / k;
    result += term;
    if (term.max_abs() <= 1e-18 * result.max_abs()) break;
  }
  for (int i = 0; i < squarings; ++i) result = result * result;
  if (!result.all_finite()) throw NumericError("matrix exponential overflowed");
  return result;
}

namespace detail {

// e^(A k h) B for k = 0..steps, built by repeated multiplication with e^(A h).
inline std::vector<DenseMatrix> propagated_inputs(const LtiSystem& sys, double t_f, std::size_t steps) {
  const double h = t_f / static_cast<double>(steps);
  DenseMatrix step = matrix_exponential(sys.a * h);
  std::vector<DenseMatrix> out;
  out.reserve(steps + 1);
  out.push_back(sys.b);
  for (std::size_t k = 1; k <= steps; ++k) out.push_back(step * out.back());
  if (!out.back().all_finite()) throw NumericError("input propagation overflowed");
  return out;
}

inline void check_grid(double t_f, std::size_t steps) {
  if (!(t_f > 0.0) || !std::isfinite(t_f)) throw InvalidInput("t_f must be positive");
  if (steps < 2 || steps % 2 != 0) throw InvalidInput("step count must be even and >= 2");
}

inline DenseMatrix gramian_from(const std::vector<DenseMatrix>& propagated, double t_f) {
  const std::size_t steps = propagated.size() - 1;
  const double h = t_f / static_cast<double>(steps);
  const std::size_t n = propagated.front().rows();
  DenseMatrix w(n, n);
  for (std::size_t k = 0; k <= steps; ++k) {
    double weight = (k == 0 || k == steps) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
    const DenseMatrix& p = propagated[k];
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t m = 0; m < p.cols(); ++m) s += p(i, m) * p(j, m);
        w(i, j) += weight * s;
      }
  }
  w *= h / 3.0;
  if (!w.all_finite()) throw NumericError("Gramian is not finite");
  return w;
}

// Gaussian elimination with partial pivoting. Returns the solution and the
// ratio of largest to smallest pivot magnitude as a condition estimate.
inline std::vector<double> solve_linear(DenseMatrix m, std::vector<double> rhs, double& condition) {
  const std::size_t n = m.rows();
  double max_pivot = 0.0;
  double min_pivot = std::numeric_limits<double>::infinity();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
    if (piv != col) {
      for (std::size_t c = 0; c < n; ++c) std::swap(m(piv, c), m(col, c));
      std::swap(rhs[piv], rhs[col]);
    }
    double d = std::abs(m(col, col));
    max_pivot = std::max(max_pivot, d);
    min_pivot = std::min(min_pivot, d);
    if (d == 0.0) {
      condition = std::numeric_limits<double>::infinity();
      return {};
    }
    for (std::size_t r = col + 1; r < n; ++r) {
      double f = m(r, col) / m(col, col);
      if (f == 0.0) continue;
      for (std::size_t c = col; c < n; ++c) m(r, c) -= f * m(col, c);
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = rhs[i];
    for (std::size_t c = i + 1; c < n; ++c) s -= m(i, c) * x[c];
    x[i] = s / m(i, i);
  }
  condition = n == 0 ? 1.0 : max_pivot / min_pivot;
  return x;
}

}  // namespace detail

/// W_B = int_0^t_f e^(A tau) B B^T e^(A^T tau) dtau by composite Simpson.
inline DenseMatrix controllability_gramian(const LtiSystem& sys, double t_f, std::size_t steps = 2000) {
  detail::check_grid(t_f, steps);
  return detail::gramian_from(detail::propagated_inputs(sys, t_f, steps), t_f);
}

/// Input samples u(t_k) on a uniform time grid.
struct InputTrajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> values;  // one M-vector per time

  // Linear interpolation, clamped to the grid ends.
  std::vector<double> at(double t) const {
    if (times.empty()) return {};
    if (t <= times.front()) return values.front();
    if (t >= times.back()) return values.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    std::size_t hi = static_cast<std::size_t>(it - times.begin());
    std::size_t lo = hi - 1;
    double w = (t - times[lo]) / (times[hi] - times[lo]);
    std::vector<double> out(values[lo].size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - w) * values[lo][i] + w * values[hi][i];
    return out;
  }
};

inline constexpr double kMaxGramianCondition = 1e12;

/// The designed input is sampled this many times more finely than the Simpson
/// grid. Linear interpolation between samples is the dominant error of the
/// simulated y(t_f); with the default grids every RK4 stage lands on a sample.
inline constexpr std::size_t kInputRefinement = 8;

/// Minimum-energy input steering y(t_f) = C x(t_f) to zero:
/// u(t) = -B^T e^(A^T (t_f - t)) C^T (C W_B C^T)^-1 C e^(A t_f) x0.
/// Throws NumericError when C W_B C^T is too ill-conditioned to invert.
inline InputTrajectory design_input(const LtiSystem& sys, std::span<const double> x0, double t_f,
                                    std::size_t steps = 2000) {
  detail::check_grid(t_f, steps);
  if (x0.size() != sys.state_dim()) throw InvalidInput("x0 has the wrong dimension");
  const std::size_t samples = steps * kInputRefinement;
  auto propagated = detail::propagated_inputs(sys, t_f, samples);
  std::vector<DenseMatrix> simpson_nodes;
  simpson_nodes.reserve(steps + 1);
  for (std::size_t k = 0; k <= samples; k += kInputRefinement) simpson_nodes.push_back(propagated[k]);
  DenseMatrix w = detail::gramian_from(simpson_nodes, t_f);
  DenseMatrix output_gramian = sys.c * w * sys.c.transpose();

  std::vector<double> free_response = multiply(sys.c, multiply(matrix_exponential(sys.a * t_f), x0));
  double condition = 0.0;
  std::vector<double> lambda = detail::solve_linear(output_gramian, free_response, condition);
  if (!(condition < kMaxGramianCondition)) {
    throw NumericError("not numerically target controllable (condition estimate " +
                       std::to_string(condition) + ")");
  }
  std::vector<double> z = multiply(sys.c.transpose(), lambda);

  InputTrajectory u;
  u.times.resize(samples + 1);
  u.values.resize(samples + 1);
  for (std::size_t k = 0; k <= samples; ++k) {
    u.times[k] = t_f * static_cast<double>(k) / static_cast<double>(samples);
    const DenseMatrix& p = propagated[samples - k];  // e^(A (t_f - t_k)) B
    std::vector<double> uk(sys.input_dim(), 0.0);
    for (std::size_t m = 0; m < uk.size(); ++m) {
      double s = 0.0;
      for (std::size_t i = 0; i < p.rows(); ++i) s += p(i, m) * z[i];
      uk[m] = -s;
    }
    u.values[k] = std::move(uk);
  }
  return u;
}

struct StateTrajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  std::vector<std::vector<double>> outputs;  // y = C x at each time
  std::vector<double> final_output;
};

/// Fixed-step RK4 on x' = Ax + Bu with u linearly interpolated.
inline StateTrajectory simulate(const LtiSystem& sys, const InputTrajectory& u, std::span<const double> x0,
                                double t_f, std::size_t steps = 4000) {
  if (!(t_f > 0.0)) throw InvalidInput("t_f must be positive");
  if (steps == 0) throw InvalidInput("step count must be positive");
  if (x0.size() != sys.state_dim()) throw InvalidInput("x0 has the wrong dimension");
  if (u.times.empty() || u.times.front() > 0.0 || u.times.back() < t_f * (1.0 - 1e-12)) {
    throw InvalidInput("input trajectory does not span [0, t_f]");
  }
  const std::size_t n = sys.state_dim();
  const double h = t_f / static_cast<double>(steps);

  auto rhs = [&](double t, const std::vector<double>& x) {
    std::vector<double> dx = multiply(sys.a, x);
    std::vector<double> bu = multiply(sys.b, u.at(t));
    for (std::size_t i = 0; i < n; ++i) dx[i] += bu[i];
    return dx;
  };
  auto axpy = [n](const std::vector<double>& x, double a, const std::vector<double>& d) {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + a * d[i];
    return out;
  };

  StateTrajectory out;
  out.times.reserve(steps + 1);
  out.states.reserve(steps + 1);
  std::vector<double> x(x0.begin(), x0.end());
  out.times.push_back(0.0);
  out.states.push_back(x);
  for (std::size_t k = 0; k < steps; ++k) {
    double t = h * static_cast<double>(k);
    auto k1 = rhs(t, x);
    auto k2 = rhs(t + h / 2, axpy(x, h / 2, k1));
    auto k3 = rhs(t + h / 2, axpy(x, h / 2, k2));
    auto k4 = rhs(t + h, axpy(x, h, k3));
    for (std::size_t i = 0; i < n; ++i) x[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    if (!std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); })) {
      throw NumericError("state became non-finite during simulation");
    }
    out.times.push_back(h * static_cast<double>(k + 1));
    out.states.push_back(x);
  }
  out.outputs.reserve(out.states.size());
  for (const auto& s : out.states) out.outputs.push_back(multiply(sys.c, s));
  out.final_output = out.outputs.back();
  return out;
}

/// CSV with header t,y_1,...,y_p; 6 significant digits.
inline void write_output_csv(std::ostream& os, const StateTrajectory& traj) {
  const auto old_precision = os.precision(6);
  std::size_t p = traj.final_output.size();
  os << 't';
  for (std::size_t i = 1; i <= p; ++i) os << ",y_" << i;
  os << '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    os << traj.times[k];
    for (double y : traj.outputs[k]) os << ',' << y;
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace targetflow
