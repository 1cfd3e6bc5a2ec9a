#include "jumpresp/jump_integrals.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "jumpresp/errors.hpp"
#include "jumpresp/quadrature.hpp"

namespace jumpresp {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double gvalue(const std::optional<IntensityShape>& g, const Eigen::Ref<const Vector>& x) {
  return g ? (*g)(x) : 1.0;
}

// gamma * p0(xhat) * |Jac| * g(xhat) accumulated over atoms. Shared with the
// quadrature oracle, which is exact for a discrete law.
double discrete_sum(const JumpIntegralSpec& spec, const DiscreteLaw& law, const Eigen::Ref<const Vector>& x) {
  double acc = 0.0;
  for (std::size_t j = 0; j < law.atoms().size(); ++j) {
    const InverseJump inv = invert_jump(spec.map, x, law.atoms()[j]);
    acc += law.probs()[j] * eval_density(spec.p0, inv.xhat) * inv.jacobian * gvalue(spec.gshape, inv.xhat);
  }
  return acc;
}

double log_sum_exp(const std::vector<double>& terms) {
  double top = -std::numeric_limits<double>::infinity();
  for (double t : terms) top = std::max(top, t);
  if (!std::isfinite(top)) return top;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  return top + std::log(acc);
}

std::vector<std::pair<double, const GaussianDensity*>> law_components(const JumpLaw& law) {
  std::vector<std::pair<double, const GaussianDensity*>> out;
  if (const auto* g = std::get_if<GaussianDensity>(&law)) {
    out.emplace_back(1.0, g);
  } else if (const auto* m = std::get_if<GaussianMixture>(&law)) {
    for (std::size_t j = 0; j < m->size(); ++j) out.emplace_back(m->weights()[j], &m->components()[j]);
  }
  return out;
}

}  // namespace

JumpIntegral::JumpIntegral(JumpIntegralSpec spec) : spec_(std::move(spec)) {
  const Eigen::Index K = spec_.map.dim();
  const Eigen::Index d = spec_.map.noise_dim();
  if (density_dim(spec_.p0) != K) throw ValidationError("p0 dimension does not match the jump map");
  if (law_dim(spec_.law) != d) throw ValidationError("jump law dimension does not match H* columns");
  if (spec_.gshape && !spec_.gshape->is_constant() && spec_.gshape->bumps().front().dim() != K) {
    throw ValidationError("intensity shape dimension does not match the jump map");
  }
  v0_ = spec_.map.inverse_linear() * spec_.map.h();

  if (std::holds_alternative<DiscreteLaw>(spec_.law)) {
    route_ = Route::kDiscrete;
    return;
  }
  if (!spec_.map.z_coupled()) {
    route_ = Route::kPullback;
    return;
  }
  route_ = Route::kClosedForm;

  const Matrix& Minv = spec_.map.inverse_linear();
  const Matrix M = Minv * spec_.map.Hstar();  // (I+H)^{-1} H*, K x d
  const double log_base = -0.5 * static_cast<double>(K) * kLog2Pi - std::log(spec_.map.abs_det());

  // Intensity-shape factors: (xi_k, C_g^{-1}, C_g^{-1} m_g, m_g^T C_g^{-1} m_g).
  struct GFactor {
    double weight;
    Matrix prec;
    Vector shift;
    double quad;
  };
  std::vector<GFactor> gfactors;
  if (has_bump()) {
    const auto& gs = *spec_.gshape;
    for (std::size_t k = 0; k < gs.bumps().size(); ++k) {
      const auto& bump = gs.bumps()[k];
      const Vector shift = bump.precision() * bump.mean();
      gfactors.push_back({gs.weights()[k], bump.precision(), shift, bump.mean().dot(shift)});
    }
  } else {
    gfactors.push_back({1.0, Matrix::Zero(K, K), Vector::Zero(K), 0.0});
  }

  for (const auto& [beta, p0c] : density_components(spec_.p0)) {
    if (beta == 0.0) continue;
    const Vector p0shift = p0c->precision() * p0c->mean();
    const double p0quad = p0c->mean().dot(p0shift);
    for (const auto& [gamma, nuc] : law_components(spec_.law)) {
      if (gamma == 0.0) continue;
      const Vector nushift = nuc->precision() * nuc->mean();
      const double nuquad = nuc->mean().dot(nushift);
      for (const auto& gf : gfactors) {
        Term term;
        term.Q = p0c->precision() + gf.prec;
        term.r = p0shift + gf.shift;
        term.MtQ = M.transpose() * term.Q;
        term.b0 = M.transpose() * term.r - nushift;
        term.c0 = p0quad + gf.quad + nuquad;
        Matrix A = term.MtQ * M + nuc->precision();
        A = 0.5 * (A + A.transpose());
        term.A.compute(A);
        if (term.A.info() != Eigen::Success) throw NumericalError("jump integral: matrix A is not positive definite");
        const Matrix LA = term.A.matrixL();
        const double logdetA = 2.0 * LA.diagonal().array().log().sum();
        term.log_prefactor = std::log(beta * gamma * gf.weight) + log_base -
                             0.5 * (p0c->log_det_cov() + nuc->log_det_cov() + logdetA);
        terms_.push_back(std::move(term));
      }
    }
  }
}

double JumpIntegral::closed_form_log(const Eigen::Ref<const Vector>& x) const {
  // w = (I+H)^{-1}(h - x)
  const Vector w = v0_ - spec_.map.inverse_linear() * x;
  std::vector<double> logs;
  logs.reserve(terms_.size());
  for (const auto& t : terms_) {
    const Vector Qw = t.Q * w;
    const Vector b = t.MtQ * w + t.b0;
    const double c = w.dot(Qw) + 2.0 * w.dot(t.r) + t.c0;
    const Vector Ainv_b = t.A.solve(b);
    logs.push_back(t.log_prefactor + 0.5 * (b.dot(Ainv_b) - c));
  }
  return logs.size() == 1 ? logs.front() : log_sum_exp(logs);
}

double JumpIntegral::log_value(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != dim()) throw ValidationError("jump integral argument has wrong dimension");
  switch (route_) {
    case Route::kDiscrete:
      return std::log(discrete_sum(spec_, std::get<DiscreteLaw>(spec_.law), x));
    case Route::kPullback: {
      const InverseJump inv = invert_jump(spec_.map, x);
      const double g = gvalue(spec_.gshape, inv.xhat);
      return log_density(spec_.p0, inv.xhat) + std::log(inv.jacobian) + std::log(g);
    }
    case Route::kClosedForm:
      return closed_form_log(x);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double JumpIntegral::operator()(const Eigen::Ref<const Vector>& x) const {
  if (route_ == Route::kDiscrete) {
    if (x.size() != dim()) throw ValidationError("jump integral argument has wrong dimension");
    return discrete_sum(spec_, std::get<DiscreteLaw>(spec_.law), x);
  }
  return std::exp(log_value(x));
}

double eval_J_discrete(const JumpIntegral& J, const Eigen::Ref<const Vector>& x) {
  if (J.route() != JumpIntegral::Route::kDiscrete) throw ValidationError("eval_J_discrete needs a discrete jump law");
  return J(x);
}

double eval_J_gaussian(const JumpIntegral& J, const Eigen::Ref<const Vector>& x) {
  const auto& s = J.spec();
  if (!std::holds_alternative<GaussianDensity>(s.law) || !std::holds_alternative<GaussianDensity>(s.p0)) {
    throw ValidationError("eval_J_gaussian needs Gaussian p0 and Gaussian jump law");
  }
  if (J.has_bump()) throw ValidationError("eval_J_gaussian does not take an intensity shape; use eval_Jg_gaussian");
  return J(x);
}

double eval_Jg_gaussian(const JumpIntegral& J, const Eigen::Ref<const Vector>& x) {
  const auto& s = J.spec();
  if (!std::holds_alternative<GaussianDensity>(s.law) || !std::holds_alternative<GaussianDensity>(s.p0)) {
    throw ValidationError("eval_Jg_gaussian needs Gaussian p0 and Gaussian jump law");
  }
  if (!s.gshape || s.gshape->kind() != IntensityShape::Kind::kBump) {
    throw ValidationError("eval_Jg_gaussian needs a Gaussian bump intensity shape");
  }
  return J(x);
}

double eval_J_mixture(const JumpIntegral& J, const Eigen::Ref<const Vector>& x) {
  if (J.route() == JumpIntegral::Route::kDiscrete) throw ValidationError("eval_J_mixture needs a Gaussian-type jump law");
  return J(x);
}

double eval_J_quadrature(const JumpIntegralSpec& spec, const Eigen::Ref<const Vector>& x, int n_nodes) {
  if (const auto* discrete = std::get_if<DiscreteLaw>(&spec.law)) return discrete_sum(spec, *discrete, x);
  const Eigen::Index d = law_dim(spec.law);
  if (d > 3) throw ValidationError("quadrature oracle supports jump dimension d <= 3");
  if (n_nodes < 1) throw ValidationError("quadrature needs at least one node per axis");
  const GaussHermiteRule rule = gauss_hermite(n_nodes);
  const double norm = std::pow(std::numbers::pi, -0.5 * static_cast<double>(d));

  double total = 0.0;
  for (const auto& [gamma, comp] : law_components(spec.law)) {
    if (gamma == 0.0) continue;
    const Matrix scaled = std::sqrt(2.0) * comp->chol_lower();
    std::vector<int> idx(static_cast<std::size_t>(d), 0);
    Vector xi(d);
    double acc = 0.0;
    while (true) {
      double w = norm;
      for (Eigen::Index a = 0; a < d; ++a) {
        xi[a] = rule.nodes[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
        w *= rule.weights[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
      }
      const Vector z = comp->mean() + scaled * xi;
      const InverseJump inv = invert_jump(spec.map, x, z);
      acc += w * eval_density(spec.p0, inv.xhat) * inv.jacobian * gvalue(spec.gshape, inv.xhat);
      Eigen::Index a = 0;
      for (; a < d; ++a) {
        if (++idx[static_cast<std::size_t>(a)] < n_nodes) break;
        idx[static_cast<std::size_t>(a)] = 0;
      }
      if (a == d) break;
    }
    total += gamma * acc;
  }
  return total;
}

}  // namespace jumpresp
