#pragma once

#include <optional>
#include <vector>

#include "jumpresp/core_model.hpp"

namespace jumpresp {

// Inputs of the nu-integral
//   J(x)   = int p0(xhat(x, z)) |d xhat / dx| nu(dz)
//   J_g(x) = int g(xhat(x, z)) p0(xhat(x, z)) |d xhat / dx| nu(dz)
// where xhat is the x-inverse of the affine jump map. An absent (or
// constant) gshape gives J; a Gaussian bump or bump mixture gives J_g.
struct JumpIntegralSpec {
  Density p0;
  AffineJumpMap map;
  JumpLaw law;
  std::optional<IntensityShape> gshape;
};

// Assembled evaluator. All x-independent pieces of the closed forms are built
// once here; a call then costs one K-vector product per component term and one
// d-dimensional Cholesky solve.
class JumpIntegral {
 public:
  enum class Route {
    kDiscrete,    // finite sum over atoms
    kPullback,    // H* = 0 or d = 0: nu integrates out
    kClosedForm,  // Gaussian / mixture nu coupled through H*
  };

  explicit JumpIntegral(JumpIntegralSpec spec);

  const JumpIntegralSpec& spec() const { return spec_; }
  Route route() const { return route_; }
  bool has_bump() const { return spec_.gshape && !spec_.gshape->is_constant(); }
  Eigen::Index dim() const { return spec_.map.dim(); }

  double operator()(const Eigen::Ref<const Vector>& x) const;
  double log_value(const Eigen::Ref<const Vector>& x) const;

  // Number of (p0, nu, g) component tuples in the closed form.
  std::size_t term_count() const { return terms_.size(); }

 private:
  struct Term {
    double log_prefactor;
    Matrix Q;          // C_i^{-1} + C_{g,k}^{-1}
    Vector r;          // C_i^{-1} m_i + C_{g,k}^{-1} m_{g,k}
    Matrix MtQ;        // ((I+H)^{-1} H*)^T Q
    Vector b0;         // ((I+H)^{-1} H*)^T r - C_nu^{-1} m_nu
    double c0;         // m^T C^{-1} m + m_g^T C_g^{-1} m_g + m_nu^T C_nu^{-1} m_nu
    Eigen::LLT<Matrix> A;
  };

  double closed_form_log(const Eigen::Ref<const Vector>& x) const;

  JumpIntegralSpec spec_;
  Route route_;
  Vector v0_;  // (I+H)^{-1} h
  std::vector<Term> terms_;
};

// Sum over atoms of gamma_j p0(xhat(x, z_j)) |Jac| [g(xhat(x, z_j))].
double eval_J_discrete(const JumpIntegral& J, const Eigen::Ref<const Vector>& x);
// Closed form for Gaussian p0 and Gaussian nu without intensity shape.
double eval_J_gaussian(const JumpIntegral& J, const Eigen::Ref<const Vector>& x);
// Closed form for Gaussian p0, Gaussian nu and a single Gaussian bump g.
double eval_Jg_gaussian(const JumpIntegral& J, const Eigen::Ref<const Vector>& x);
// Sum of closed-form terms over all component tuples (beta_i gamma_j xi_k).
double eval_J_mixture(const JumpIntegral& J, const Eigen::Ref<const Vector>& x);
// Independent oracle: tensor-product Gauss-Hermite quadrature over each
// Gaussian component of nu (exact sum for a discrete law), d <= 3.
double eval_J_quadrature(const JumpIntegralSpec& spec, const Eigen::Ref<const Vector>& x, int n_nodes = 40);

}  // namespace jumpresp
