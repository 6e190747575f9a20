#include "wlr/gp.hpp"

#include <algorithm>
#include <limits>
#include <numbers>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

namespace wlr {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log sqrt(2 pi)
constexpr double kJitter = 1e-8;
constexpr double kFailedEval = 1e10;

double normal_pdf_over_cdf_direct(double u) {
  const double cdf = 0.5 * std::erfc(-u / std::numbers::sqrt2);
  return std::exp(-0.5 * u * u - kLogSqrt2Pi) / cdf;
}

}  // namespace

double inv_mills(double u) {
  if (u >= -6.0) return normal_pdf_over_cdf_direct(u);
  // Mills ratio m(x) = Phi(-x)/phi(x) for x = -u > 6, by continued fraction
  // m(x) = 1/(x + 1/(x + 2/(x + 3/(...)))); the ratio is 1/m.
  const double x = -u;
  double cf = 0.0;
  for (int k = 100; k >= 1; --k) cf = k / (x + cf);
  return x + cf;
}

double log_normal_cdf(double u) {
  if (u >= -6.0) return std::log(0.5 * std::erfc(-u / std::numbers::sqrt2));
  return -0.5 * u * u - kLogSqrt2Pi - std::log(inv_mills(u));
}

void GpHyperparams::validate() const {
  if (!(len_x > 0.0) || !(len_z > 0.0))
    throw std::invalid_argument("GpHyperparams: lengthscales must be positive");
  if (!(signal_var > 0.0))
    throw std::invalid_argument("GpHyperparams: signal_var must be positive");
}

Eigen::MatrixXd se_kernel(const Eigen::MatrixX2d& a, const Eigen::MatrixX2d& b,
                          const GpHyperparams& hp) {
  hp.validate();
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    const auto dx = (a.col(0).array() - b(j, 0)) / hp.len_x;
    const auto dz = (a.col(1).array() - b(j, 1)) / hp.len_z;
    k.col(j) = (hp.signal_var * (-0.5 * (dx.square() + dz.square())).exp()).matrix();
  }
  return k;
}

void GpModel::fit(const Eigen::MatrixX2d& inputs, const Eigen::VectorXd& targets,
                  const GpHyperparams& hp) {
  hp.validate();
  const Eigen::Index n = targets.size();
  if (n == 0) throw std::invalid_argument("GpModel::fit: no training data");
  if (inputs.rows() != n)
    throw std::invalid_argument("GpModel::fit: inputs/targets size mismatch");
  for (Eigen::Index i = 0; i < n; ++i)
    if (targets[i] != 1.0 && targets[i] != -1.0)
      throw std::invalid_argument("GpModel::fit: targets must be +1 or -1");

  hp_ = hp;
  x_ = inputs;
  kmat_ = se_kernel(inputs, inputs, hp);
  kmat_.diagonal().array() += kJitter;

  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd grad(n), sw(n), z(n);
  Eigen::MatrixXd bmat(n, n);
  Eigen::LLT<Eigen::MatrixXd> llt;

  // Newton mode-finding in the numerically stable B = I + sqrt(W) K sqrt(W)
  // parametrization. W is the exact negative Hessian of log Phi(y f):
  // W = im(z)^2 + z im(z) with z = y f — note the z (not f) factor; the
  // Newton fixed point is W-independent, so the wrong curvature still
  // "converges" on balanced data while oscillating on one-sided data.
  double last_obj = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < 60; ++iter) {
    z = targets.cwiseProduct(f);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double im = inv_mills(z[i]);
      grad[i] = targets[i] * im;
      sw[i] = std::sqrt(std::max(im * im + z[i] * im, 1e-12));
    }
    bmat = sw * sw.transpose();
    bmat.array() *= kmat_.array();
    bmat.diagonal().array() += 1.0;
    llt.compute(bmat);
    if (llt.info() != Eigen::Success)
      throw SingularKernel("GpModel::fit: Cholesky of the Newton system failed");
    const Eigen::VectorXd b = sw.cwiseProduct(sw).cwiseProduct(f) + grad;
    a = b - sw.cwiseProduct(llt.solve(sw.cwiseProduct(kmat_ * b)));
    f = kmat_ * a;

    z = targets.cwiseProduct(f);
    double obj = -0.5 * a.dot(f);
    for (Eigen::Index i = 0; i < n; ++i) obj += log_normal_cdf(z[i]);
    if (std::abs(obj - last_obj) < 1e-9 * std::max(1.0, std::abs(obj))) break;
    last_obj = obj;
  }

  // Recompute the likelihood terms at the converged mode; `a` satisfies
  // f = K a exactly, which keeps the marginal likelihood free of any
  // solve(K, f) (the kernel can be conditioned as badly as ~1e10).
  f_ = f;
  z = targets.cwiseProduct(f);
  double sum_log_cdf = 0.0;
  grad_.resize(n);
  sw_.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double im = inv_mills(z[i]);
    grad_[i] = targets[i] * im;
    sw_[i] = std::sqrt(std::max(im * im + z[i] * im, 1e-12));
    sum_log_cdf += log_normal_cdf(z[i]);
  }
  bmat = sw_ * sw_.transpose();
  bmat.array() *= kmat_.array();
  bmat.diagonal().array() += 1.0;
  llt.compute(bmat);
  if (llt.info() != Eigen::Success)
    throw SingularKernel("GpModel::fit: Cholesky at the converged mode failed");
  lmat_ = llt.matrixL();
  lml_ = -0.5 * f_.dot(a) + sum_log_cdf - lmat_.diagonal().array().log().sum();
  fitted_ = true;
}

void GpModel::posterior(const Eigen::MatrixX2d& queries, Eigen::VectorXd& mu,
                        Eigen::VectorXd& var) const {
  if (!fitted_) throw std::logic_error("GpModel::posterior: model not fitted");
  const Eigen::MatrixXd ks = se_kernel(x_, queries, hp_);
  mu = ks.transpose() * grad_;
  const Eigen::MatrixXd v =
      lmat_.triangularView<Eigen::Lower>().solve(sw_.asDiagonal() * ks);
  var = (hp_.signal_var - v.colwise().squaredNorm().transpose().array()).max(0.0).matrix();
}

double GpModel::log_marginal() const {
  if (!fitted_) throw std::logic_error("GpModel::log_marginal: model not fitted");
  return lml_;
}

namespace {

struct HyperObjectiveCtx {
  const Eigen::MatrixX2d* inputs;
  const Eigen::VectorXd* targets;
  const HyperBounds* bounds;
  const HyperPrior* prior;
  double best_value = std::numeric_limits<double>::infinity();
  Eigen::Vector3d best_log_params;
};

Eigen::Vector3d clamp_log_params(const Eigen::Vector3d& p, const HyperBounds& b) {
  Eigen::Vector3d c;
  c[0] = std::clamp(p[0], std::log(b.len_min), std::log(b.len_max));
  c[1] = std::clamp(p[1], std::log(b.len_min), std::log(b.len_max));
  c[2] = std::clamp(p[2], std::log(b.var_min), std::log(b.var_max));
  return c;
}

double square(double v) { return v * v; }

// GSL callback: must not let exceptions escape into C.
double hyper_objective(const gsl_vector* v, void* params) {
  auto* ctx = static_cast<HyperObjectiveCtx*>(params);
  try {
    const Eigen::Vector3d raw(gsl_vector_get(v, 0), gsl_vector_get(v, 1),
                              gsl_vector_get(v, 2));
    const Eigen::Vector3d p = clamp_log_params(raw, *ctx->bounds);
    GpModel model;
    model.fit(*ctx->inputs, *ctx->targets,
              {std::exp(p[0]), std::exp(p[1]), std::exp(p[2])});
    const HyperPrior& pr = *ctx->prior;
    const double penalty = 0.5 * square((p[0] - pr.log_len_mean) / pr.log_len_sd) +
                           0.5 * square((p[1] - pr.log_len_mean) / pr.log_len_sd) +
                           0.5 * square((p[2] - pr.log_var_mean) / pr.log_var_sd);
    const double value = -model.log_marginal() + penalty;
    if (!std::isfinite(value)) return kFailedEval;
    if (value < ctx->best_value) {
      ctx->best_value = value;
      ctx->best_log_params = p;
    }
    return value;
  } catch (...) {
    return kFailedEval;
  }
}

}  // namespace

GpHyperparams optimize_hyperparams(const Eigen::MatrixX2d& inputs,
                                   const Eigen::VectorXd& targets,
                                   const GpHyperparams& warm_start,
                                   const HyperBounds& bounds,
                                   const HyperPrior& prior) {
  gsl_set_error_handler_off();

  HyperObjectiveCtx ctx;
  ctx.inputs = &inputs;
  ctx.targets = &targets;
  ctx.bounds = &bounds;
  ctx.prior = &prior;

  warm_start.validate();
  const Eigen::Vector3d warm = clamp_log_params(
      {std::log(warm_start.len_x), std::log(warm_start.len_z),
       std::log(warm_start.signal_var)},
      bounds);
  const GpHyperparams defaults;
  const Eigen::Vector3d def = clamp_log_params(
      {std::log(defaults.len_x), std::log(defaults.len_z),
       std::log(defaults.signal_var)},
      bounds);
  ctx.best_log_params = warm;

  std::vector<Eigen::Vector3d> starts{warm};
  if ((def - warm).cwiseAbs().maxCoeff() > 1e-12) starts.push_back(def);

  gsl_multimin_function func;
  func.f = &hyper_objective;
  func.n = 3;
  func.params = &ctx;

  for (const Eigen::Vector3d& start : starts) {
    gsl_vector* x0 = gsl_vector_alloc(3);
    gsl_vector* step = gsl_vector_alloc(3);
    for (int i = 0; i < 3; ++i) {
      gsl_vector_set(x0, i, start[i]);
      gsl_vector_set(step, i, 0.25);
    }
    gsl_multimin_fminimizer* mini =
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 3);
    if (mini && gsl_multimin_fminimizer_set(mini, &func, x0, step) == GSL_SUCCESS) {
      for (int iter = 0; iter < 60; ++iter) {
        if (gsl_multimin_fminimizer_iterate(mini) != GSL_SUCCESS) break;
        const double size = gsl_multimin_fminimizer_size(mini);
        if (gsl_multimin_test_size(size, 1e-3) == GSL_SUCCESS) break;
      }
    }
    if (mini) gsl_multimin_fminimizer_free(mini);
    gsl_vector_free(x0);
    gsl_vector_free(step);
  }

  if (!std::isfinite(ctx.best_value)) ctx.best_log_params = warm;  // all evals failed
  return {std::exp(ctx.best_log_params[0]), std::exp(ctx.best_log_params[1]),
          std::exp(ctx.best_log_params[2])};
}

}  // namespace wlr
