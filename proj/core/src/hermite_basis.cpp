#include "hermsketch/hermite_basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hermsketch {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
const double kQuarterRootPi = std::pow(std::numbers::pi, 0.25);
const double kInvQuarterRootPi = 1.0 / kQuarterRootPi;

// sqrt(2/(k+1)) and sqrt(k/(k+1)) for the three-term recurrences.
struct RecurrenceFactors {
  double step[kMaxHermiteOrder + 1];
  double carry[kMaxHermiteOrder + 1];
};

const RecurrenceFactors& factors() {
  static const RecurrenceFactors f = [] {
    RecurrenceFactors r{};
    for (int k = 0; k <= kMaxHermiteOrder; ++k) {
      r.step[k] = std::sqrt(2.0 / (k + 1));
      r.carry[k] = std::sqrt(static_cast<double>(k) / (k + 1));
    }
    return r;
  }();
  return f;
}

void check_point_and_order(double x, int n, const char* who) {
  if (!std::isfinite(x)) {
    throw std::invalid_argument(std::string(who) + ": evaluation point must be finite");
  }
  if (n < 0 || n > kMaxHermiteOrder) {
    throw std::invalid_argument(std::string(who) + ": order must be in [0, " +
                                std::to_string(kMaxHermiteOrder) + "]");
  }
}

}  // namespace

int default_quadrature_order(int order_n) {
  const int q = 2 * order_n + 8;
  return q < 64 ? 64 : q;
}

void hermite_function_values(double x, int n, double* out) {
  check_point_and_order(x, n, "hermite_function_values");
  const auto& f = factors();
  out[0] = kInvQuarterRootPi * std::exp(-0.5 * x * x);
  if (n >= 1) out[1] = kSqrt2 * x * out[0];
  for (int k = 1; k < n; ++k) {
    out[k + 1] = x * f.step[k] * out[k] - f.carry[k] * out[k - 1];
  }
}

std::vector<double> hermite_function_values(double x, int n) {
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  hermite_function_values(x, n, out.data());
  return out;
}

void lower_integral_values(double x, int n, double* out) {
  check_point_and_order(x, n, "lower_integral_values");
  const auto& f = factors();
  out[0] = kQuarterRootPi / kSqrt2 * std::erfc(-x / kSqrt2);
  if (n >= 1) out[1] = -(kSqrt2 * kInvQuarterRootPi) * std::exp(-0.5 * x * x);
  if (n >= 2) {
    double h[kMaxHermiteOrder + 1];
    hermite_function_values(x, n - 1, h);
    for (int k = 1; k < n; ++k) {
      out[k + 1] = -f.step[k] * h[k] + f.carry[k] * out[k - 1];
    }
  }
}

std::vector<double> lower_integral_values(double x, int n) {
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  lower_integral_values(x, n, out.data());
  return out;
}

void upper_integral_values(double x, int n, double* out) {
  check_point_and_order(x, n, "upper_integral_values");
  const auto& f = factors();
  out[0] = kQuarterRootPi / kSqrt2 * std::erfc(x / kSqrt2);
  if (n >= 1) out[1] = (kSqrt2 * kInvQuarterRootPi) * std::exp(-0.5 * x * x);
  if (n >= 2) {
    double h[kMaxHermiteOrder + 1];
    hermite_function_values(x, n - 1, h);
    for (int k = 1; k < n; ++k) {
      out[k + 1] = f.step[k] * h[k] + f.carry[k] * out[k - 1];
    }
  }
}

std::vector<double> upper_integral_values(double x, int n) {
  std::vector<double> out(static_cast<std::size_t>(n) + 1);
  upper_integral_values(x, n, out.data());
  return out;
}

namespace {

// Implicit-shift QL for a symmetric tridiagonal matrix; d holds the
// diagonal and e[i] couples rows i and i+1 (e[n-1] ignored). On return d
// holds the eigenvalues, unsorted.
void tridiagonal_eigenvalues(std::vector<double>& d, std::vector<double>& e) {
  const int n = static_cast<int>(d.size());
  e[n - 1] = 0.0;
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m = l;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (iter++ == 50) {
          throw std::runtime_error("gauss_hermite_rule: eigenvalue iteration did not converge");
        }
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0;
        double c = 1.0;
        double p = 0.0;
        int i = m - 1;
        for (; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

}  // namespace

GaussHermiteRule gauss_hermite_rule(int order) {
  if (order < 1 || order > kMaxQuadratureOrder) {
    throw std::invalid_argument("gauss_hermite_rule: order must be in [1, " +
                                std::to_string(kMaxQuadratureOrder) + "]");
  }

  // Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
  // orthonormal Hermite recurrence (zero diagonal, off-diagonal
  // sqrt(k/2)). A Newton polish on the weightless normalized functions
  // psi_k(x) = e^{x^2/2} h_k(x) sharpens each node to a machine-accurate
  // root and yields the weight from the derivative. Eigenvalues are a
  // reliable starting point at every order; Newton from ad hoc guesses
  // loses the root basin once the spectrum gets dense.
  std::vector<double> diag(order, 0.0);
  std::vector<double> off(order, 0.0);
  for (int k = 1; k < order; ++k) off[k - 1] = std::sqrt(0.5 * k);
  tridiagonal_eigenvalues(diag, off);
  std::sort(diag.begin(), diag.end());

  GaussHermiteRule rule;
  rule.order = order;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  rule.total_weights.resize(order);

  constexpr int kPolishIters = 16;
  for (int i = (order - 1) / 2; i < order; ++i) {
    const int mirror = order - 1 - i;
    double z = i == mirror ? 0.0 : diag[i];
    double deriv = 0.0;
    for (int it = 0; it < kPolishIters; ++it) {
      double p1 = kInvQuarterRootPi;
      double p2 = 0.0;
      for (int j = 0; j < order; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      deriv = std::sqrt(2.0 * order) * p2;
      const double step = p1 / deriv;
      z -= step;
      if (std::abs(step) <= 1e-14 * std::max(1.0, std::abs(z))) break;
    }
    rule.nodes[i] = z;
    rule.nodes[mirror] = -z;
    rule.weights[i] = 2.0 / (deriv * deriv);
    rule.weights[mirror] = rule.weights[i];
  }
  for (int i = 0; i < order; ++i) {
    rule.total_weights[i] = rule.weights[i] * std::exp(rule.nodes[i] * rule.nodes[i]);
  }
  return rule;
}

HermiteBasisTables::HermiteBasisTables(int order_n, int quadrature_order) : order_n_(order_n) {
  if (order_n < 0 || order_n > kMaxHermiteOrder) {
    throw std::invalid_argument("HermiteBasisTables: order out of range");
  }
  if (quadrature_order < order_n + 1) {
    throw std::invalid_argument("HermiteBasisTables: quadrature order must be at least order_n + 1");
  }
  rule_ = gauss_hermite_rule(quadrature_order);

  const int m = order_n_ + 1;
  std::vector<long double> wacc(static_cast<std::size_t>(m) * m, 0.0L);
  std::vector<long double> zacc(m, 0.0L);
  std::vector<double> h(m);
  std::vector<double> low(m);
  for (int i = 0; i < rule_.order; ++i) {
    const double u = kSqrt2 * rule_.nodes[i];
    const double c = kSqrt2 * rule_.total_weights[i];
    hermite_function_values(u, order_n_, h.data());
    lower_integral_values(u, order_n_, low.data());
    for (int k = 0; k < m; ++k) {
      const long double ch = static_cast<long double>(c) * h[k];
      zacc[k] += ch;
      long double* row = wacc.data() + static_cast<std::size_t>(k) * m;
      for (int l = 0; l < m; ++l) row[l] += ch * low[l];
    }
  }
  w_.assign(wacc.begin(), wacc.end());
  z_.assign(zacc.begin(), zacc.end());
}

std::shared_ptr<const HermiteBasisTables> basis_tables(int order_n, int quadrature_order) {
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::shared_ptr<const HermiteBasisTables>> cache;
  std::lock_guard lock(mutex);
  auto& entry = cache[{order_n, quadrature_order}];
  if (!entry) entry = std::make_shared<const HermiteBasisTables>(order_n, quadrature_order);
  return entry;
}

std::shared_ptr<const HermiteBasisTables> basis_tables(int order_n) {
  return basis_tables(order_n, default_quadrature_order(order_n));
}

}  // namespace hermsketch
