#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace wlr {

struct SingularKernel : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Squared-exponential kernel over normalized Cartesian (x, z) with
// independent lengthscales. Inputs are expected in [-1, 1]-ish units.
struct GpHyperparams {
  double len_x = 0.3;
  double len_z = 0.3;
  double signal_var = 4.0;
  void validate() const;
};

struct HyperBounds {
  double len_min = 0.05;
  double len_max = 2.0;
  double var_min = 0.25;
  double var_max = 25.0;
};

// Log-space Gaussian penalties on the hyperparameters (MAP-II). Small
// one-sided 2IFC datasets leave the marginal likelihood nearly flat along a
// ridge where the signal variance drifts high and the acquisition chases
// lattice corners; the penalty keeps the optimum near sane scales without
// pinning it.
struct HyperPrior {
  double log_len_mean = std::log(0.3);
  double log_len_sd = 0.75;
  double log_var_mean = std::log(4.0);
  double log_var_sd = 0.5;
};

// phi(u)/Phi(u), stable for u << 0 (continued-fraction Mills ratio).
double inv_mills(double u);
// log Phi(u), stable for u << 0.
double log_normal_cdf(double u);

Eigen::MatrixXd se_kernel(const Eigen::MatrixX2d& a, const Eigen::MatrixX2d& b,
                          const GpHyperparams& hp);

// Bernoulli-probit GP classifier with a Laplace approximation at the
// posterior mode. Targets are +1 (correct) / -1 (incorrect).
class GpModel {
 public:
  void fit(const Eigen::MatrixX2d& inputs, const Eigen::VectorXd& targets,
           const GpHyperparams& hp);

  // Latent posterior mean/variance at query rows. Batched; const and safe to
  // call concurrently once fitted.
  void posterior(const Eigen::MatrixX2d& queries, Eigen::VectorXd& mu,
                 Eigen::VectorXd& var) const;

  double log_marginal() const;
  bool fitted() const { return fitted_; }
  const Eigen::VectorXd& mode() const { return f_; }
  const Eigen::VectorXd& likelihood_grad() const { return grad_; }
  const Eigen::MatrixX2d& train_inputs() const { return x_; }
  const GpHyperparams& hyperparams() const { return hp_; }

 private:
  GpHyperparams hp_;
  Eigen::MatrixX2d x_;
  Eigen::MatrixXd kmat_;   // jittered train kernel
  Eigen::VectorXd f_;      // latent mode
  Eigen::VectorXd grad_;   // d log p(y|f) at the mode
  Eigen::VectorXd sw_;     // sqrt of the Newton curvature W
  Eigen::MatrixXd lmat_;   // chol(I + sw K sw), lower
  double lml_ = 0.0;
  bool fitted_ = false;
};

// Penalized marginal-likelihood ascent over (log len_x, log len_z,
// log signal_var) by Nelder-Mead from two starts (warm + defaults); returns
// the best evaluated point clamped into bounds. Falls back to the warm start
// if every evaluation fails. Deterministic.
GpHyperparams optimize_hyperparams(const Eigen::MatrixX2d& inputs,
                                   const Eigen::VectorXd& targets,
                                   const GpHyperparams& warm_start,
                                   const HyperBounds& bounds = {},
                                   const HyperPrior& prior = {});

}  // namespace wlr
