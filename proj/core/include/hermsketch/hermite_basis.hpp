#pragma once

#include <memory>
#include <vector>

namespace hermsketch {

// Normalized Hermite functions
//
//   h_k(x) = (2^k k! sqrt(pi))^{-1/2} e^{-x^2/2} H_k(x),
//
// where H_k are the physicists' Hermite polynomials. All evaluation is done
// by recurring on the h_k directly; the raw H_k overflow double precision
// near k = 150 while |h_k(x)| <= 0.816 uniformly in x and k.

inline constexpr int kMaxHermiteOrder = 100;
inline constexpr int kMaxQuadratureOrder = 256;

// Quadrature order used for the W/z tables of a given truncation order.
int default_quadrature_order(int order_n);

// h_0(x) .. h_n(x). The pointer overloads write n+1 values into out.
std::vector<double> hermite_function_values(double x, int n);
void hermite_function_values(double x, int n, double* out);

// Lower integrals L_k(x) = integral of h_k over (-inf, x], k = 0..n.
// Base cases L_0 = pi^{1/4}/sqrt(2) * erfc(-x/sqrt(2)) and
// L_1 = -(sqrt(2)/pi^{1/4}) e^{-x^2/2}; higher orders by the three-term
// recurrence L_{k+1} = -sqrt(2/(k+1)) h_k(x) + sqrt(k/(k+1)) L_{k-1}.
std::vector<double> lower_integral_values(double x, int n);
void lower_integral_values(double x, int n, double* out);

// Upper integrals U_k(x) = integral of h_k over [x, inf), the mirror
// recurrence. L_k(x) + U_k(x) equals the whole-line integral z_k.
std::vector<double> upper_integral_values(double x, int n);
void upper_integral_values(double x, int n, double* out);

// Gauss-Hermite rule for the physicists' weight e^{-x^2}: the weights sum
// to sqrt(pi). total_weights[i] = weights[i] * e^{nodes[i]^2} supports
// integrands that carry their own Gaussian decay.
struct GaussHermiteRule {
  int order = 0;
  std::vector<double> nodes;          // ascending
  std::vector<double> weights;
  std::vector<double> total_weights;
};

// Nodes by Newton iteration on the normalized recurrence; throws
// std::runtime_error if the iteration fails to converge.
GaussHermiteRule gauss_hermite_rule(int order);

// Precomputed cross-integrals of the basis, evaluated once per order and
// shared immutably:
//
//   w_matrix[k][l] = integral over u of h_k(u) * L_l(u)
//   z_vector[k]    = integral over u of h_k(u)
//
// Both are computed with the Gauss-Hermite rule after substituting
// u = sqrt(2) t, which turns the e^{-u^2/2} decay of the integrand into the
// e^{-t^2} weight of the rule.
class HermiteBasisTables {
 public:
  HermiteBasisTables(int order_n, int quadrature_order);

  int order_n() const noexcept { return order_n_; }
  int quadrature_order() const noexcept { return rule_.order; }

  // Row-major (order_n+1) x (order_n+1).
  const std::vector<double>& w_matrix() const noexcept { return w_; }
  double w(int k, int l) const noexcept { return w_[static_cast<std::size_t>(k) * (order_n_ + 1) + l]; }
  const std::vector<double>& z_vector() const noexcept { return z_; }
  const GaussHermiteRule& quadrature() const noexcept { return rule_; }

 private:
  int order_n_ = 0;
  GaussHermiteRule rule_;
  std::vector<double> w_;
  std::vector<double> z_;
};

// Process-wide cache of immutable tables, keyed by (order, quadrature
// order). Safe to share across threads.
std::shared_ptr<const HermiteBasisTables> basis_tables(int order_n);
std::shared_ptr<const HermiteBasisTables> basis_tables(int order_n, int quadrature_order);

}  // namespace hermsketch
