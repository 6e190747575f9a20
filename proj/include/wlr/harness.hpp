#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wlr/rng.hpp"
#include "wlr/threshold.hpp"

namespace wlr {

enum class ObserverFamily { circular, elliptical };

// Ground-truth psychometric surface for the simulated 2IFC observer:
// p(x, z) = Phi((r_eff - a) / s) with r_eff = hypot(scale_x*x, scale_z*z),
// mixed with a lapse rate. a > 0 is required so the surface starts below
// target at zero displacement; no extra chance floor is applied (the 75%
// threshold then sits at exactly a + s*Phi^-1(0.75)).
struct ObserverSpec {
  ObserverFamily family = ObserverFamily::circular;
  double a_mm = 8.0;
  double s_mm = 2.0;
  double scale_x = 1.0;
  double scale_z = 1.0;
  double lapse = 0.0;

  void validate() const;
  // e.g. "circular:a=8,s=2,lapse=0" or "elliptical:a=8,s=2,sx=1.2,sz=0.8".
  static ObserverSpec parse(const std::string& text);
  std::string to_string() const;
};

class SimulatedObserver {
 public:
  SimulatedObserver(const ObserverSpec& spec, std::uint64_t seed);
  // Detection probability before lapse mixing.
  double p_true(double x_mm, double z_mm) const;
  // Response probability with lapses mixed in.
  double p_response(double x_mm, double z_mm) const;
  // Draws one uniform variate per call; deterministic given the seed.
  bool respond(double x_mm, double z_mm);
  const ObserverSpec& spec() const { return spec_; }

 private:
  ObserverSpec spec_;
  Rng rng_;
};

struct ExperimentConfig {
  Limits limits;
  int n_init = 25;        // [25, 32]
  int budget = 110;
  double p_target = 0.75;
  std::uint64_t seed = 0;
  int refit_period = 10;  // hyperparameter re-optimization cadence (adaptive trials)
  int lattice_n = 33;
  int proj_m = 20;
  int n_angles = 64;
  void validate() const;
};

enum class TrialPhase { init, adaptive };

struct LoggedTrial {
  int index = 0;
  TrialPhase phase = TrialPhase::init;
  double x_norm = 0.0;
  double z_norm = 0.0;
  double x_mm = 0.0;
  double z_mm = 0.0;
  bool correct = false;
};

struct ExperimentLog {
  std::string subject;
  std::string condition;
  Limits limits;
  double p_target = 0.75;
  std::uint64_t seed = 0;
  std::vector<LoggedTrial> trials;

  std::vector<TrialRecord> as_trial_records() const;
};

// Normalized initialization layout: 8 suprathreshold points at radius 0.9 on
// the axes/diagonals, then the nearest-to-origin points of a fixed 5x5 grid
// spanning [-0.4, 0.4]^2 (stable order) up to n_init total.
std::vector<std::pair<double, double>> init_design(int n_init);

// Row-major (z outer, x inner) lattice over [-1, 1]^2.
std::vector<std::pair<double, double>> acquisition_lattice(int n = 33);

// Lattice plus its precomputed projection rays ((m+1) posterior query rows
// per lattice point) so repeated acquisitions reuse one batched posterior.
struct AcquisitionGrid {
  std::vector<std::pair<double, double>> lattice;
  Eigen::MatrixX2d ray_points;
  int m = 20;
};

AcquisitionGrid make_acquisition_grid(int lattice_n = 33, int m = 20);

// Level-set straddle: argmax of 1.96*sd_hat - |mu_hat - Phi^-1(p_target)|
// over the lattice using the projected posterior; ties keep the lowest index.
std::size_t acquire_next(const PosteriorFn& posterior, const AcquisitionGrid& grid,
                         double p_target = 0.75);
std::size_t acquire_next(const PosteriorFn& posterior,
                         const std::vector<std::pair<double, double>>& lattice,
                         double p_target = 0.75, int m = 20);

struct ExperimentResult {
  ExperimentLog log;
  ThresholdContour contour;
  GpHyperparams hyperparams;
};

// Full adaptive run: init design -> hyperparameter fit -> acquire/respond/
// refit loop (hyperparameters re-optimized every refit_period adaptive
// trials, model refit every trial) -> contour extraction. Deterministic and
// replayable given (spec, config).
ExperimentResult run_experiment(const ObserverSpec& spec, const ExperimentConfig& config,
                                const std::string& subject = "sim",
                                const std::string& condition = "synthetic");

}  // namespace wlr
