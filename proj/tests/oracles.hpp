#pragma once

// Independent reference computations used by the unit and acceptance tests.
// None of these call into the library's numerical paths.

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

namespace oracle {

/// Eigenvalues of the arrowhead matrix [[a, g^T], [g, diag(d)]] with distinct d,
/// from bisection on the secular function f(x) = x - a + sum g_i^2 / (d_i - x).
inline std::vector<double> arrowhead_eigenvalues(double a, const std::vector<double>& d,
                                                 const std::vector<double>& g) {
  std::vector<long double> ds(d.begin(), d.end());
  std::vector<std::size_t> order(d.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return d[i] < d[j]; });
  std::vector<long double> ds_sorted, g2;
  for (auto i : order) {
    ds_sorted.push_back(d[i]);
    g2.push_back(static_cast<long double>(g[i]) * g[i]);
  }
  auto f = [&](long double x) {
    long double s = x - a;
    for (std::size_t i = 0; i < ds_sorted.size(); ++i) s += g2[i] / (ds_sorted[i] - x);
    return s;
  };
  long double bound = std::abs(static_cast<long double>(a));
  for (std::size_t i = 0; i < ds_sorted.size(); ++i)
    bound = std::max(bound, std::abs(ds_sorted[i]) + std::sqrt(g2[i]));
  long double sum_g2 = 0;
  for (auto v : g2) sum_g2 += v;
  bound += std::sqrt(sum_g2) + 1;

  // f increases strictly on every interval between poles.
  std::vector<long double> edges{-bound};
  for (auto v : ds_sorted) edges.push_back(v);
  edges.push_back(bound);
  std::vector<double> roots;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    long double lo = edges[k], hi = edges[k + 1];
    for (int it = 0; it < 400; ++it) {
      const long double mid = 0.5L * (lo + hi);
      if (mid == lo || mid == hi) break;
      (f(mid) < 0 ? lo : hi) = mid;
    }
    roots.push_back(static_cast<double>(0.5L * (lo + hi)));
  }
  return roots;
}

/// <m| exp(alpha (a^dag - a)) |n> from the Taylor series of the displacement
/// generator in a truncated Fock space (scaling and squaring, long double).
inline Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic> displacement_matrix(
    double alpha, int dim = 80) {
  using M = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  M gen = M::Zero(dim, dim);
  for (int n = 0; n + 1 < dim; ++n) {
    const long double s = std::sqrt(static_cast<long double>(n + 1));
    gen(n + 1, n) = alpha * s;  // a^dag
    gen(n, n + 1) = -alpha * s; // -a
  }
  int squarings = 0;
  long double norm = gen.cwiseAbs().colwise().sum().maxCoeff();
  while (norm > 0.25L) {
    norm *= 0.5L;
    ++squarings;
  }
  const M x = gen / std::pow(2.0L, squarings);
  M term = M::Identity(dim, dim), sum = M::Identity(dim, dim);
  for (int k = 1; k < 40; ++k) {
    term = (term * x) / static_cast<long double>(k);
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = (sum * sum).eval();
  return sum;
}

/// Multimode Franck-Condon factor |<chi_P| D(d) |chi_R>|^2 for one-excitation
/// states (-1 = vibrational ground state), with per-mode displacements d.
inline double franck_condon(const std::vector<double>& displacement, int chi_r, int chi_p) {
  long double amp = 1.0L;
  for (std::size_t q = 0; q < displacement.size(); ++q) {
    const auto dm = displacement_matrix(displacement[q]);
    const int n = chi_r == static_cast<int>(q) ? 1 : 0;
    const int m = chi_p == static_cast<int>(q) ? 1 : 0;
    amp *= dm(m, n);
  }
  return static_cast<double>(amp * amp);
}

/// dp/dt = A p by adaptive Dormand-Prince, sampled at `times`.
inline Eigen::MatrixXd integrate_master_equation(const Eigen::MatrixXd& a, const Eigen::VectorXd& p0,
                                                 const std::vector<double>& times,
                                                 double tol = 1e-13) {
  using State = std::vector<double>;
  namespace odeint = boost::numeric::odeint;
  const auto n = a.rows();
  State x(p0.data(), p0.data() + n);
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(times.size()));
  std::size_t col = 0;
  auto rhs = [&](const State& p, State& dp, double) {
    Eigen::Map<const Eigen::VectorXd> pv(p.data(), n);
    Eigen::Map<Eigen::VectorXd> dv(dp.data(), n);
    dv.noalias() = a * pv;
  };
  auto observer = [&](const State& p, double) {
    out.col(static_cast<Eigen::Index>(col++)) = Eigen::Map<const Eigen::VectorXd>(p.data(), n);
  };
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<State>());
  odeint::integrate_times(stepper, rhs, x, times.begin(), times.end(), 1e-3, observer);
  return out;
}

}  // namespace oracle
