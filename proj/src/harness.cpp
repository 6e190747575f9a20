#include "wlr/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "wlr/stats.hpp"

namespace wlr {

void ObserverSpec::validate() const {
  if (!(a_mm > 0.0))
    throw std::invalid_argument("ObserverSpec: a must be positive (p(0) below target)");
  if (!(s_mm > 0.0)) throw std::invalid_argument("ObserverSpec: s must be positive");
  if (!(scale_x > 0.0) || !(scale_z > 0.0))
    throw std::invalid_argument("ObserverSpec: axis scales must be positive");
  if (!(lapse >= 0.0 && lapse <= 0.1))
    throw std::invalid_argument("ObserverSpec: lapse must lie in [0, 0.1]");
}

ObserverSpec ObserverSpec::parse(const std::string& text) {
  ObserverSpec spec;
  const auto colon = text.find(':');
  const std::string family = text.substr(0, colon);
  if (family == "circular") {
    spec.family = ObserverFamily::circular;
  } else if (family == "elliptical") {
    spec.family = ObserverFamily::elliptical;
  } else {
    throw std::invalid_argument("ObserverSpec: unknown family '" + family + "'");
  }
  if (colon != std::string::npos) {
    std::stringstream rest(text.substr(colon + 1));
    std::string item;
    while (std::getline(rest, item, ',')) {
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos)
        throw std::invalid_argument("ObserverSpec: expected key=value, got '" + item + "'");
      const std::string key = item.substr(0, eq);
      double value = 0.0;
      try {
        std::size_t used = 0;
        value = std::stod(item.substr(eq + 1), &used);
        if (used != item.size() - eq - 1) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw std::invalid_argument("ObserverSpec: bad numeric value in '" + item + "'");
      }
      if (key == "a") {
        spec.a_mm = value;
      } else if (key == "s") {
        spec.s_mm = value;
      } else if (key == "sx") {
        spec.scale_x = value;
      } else if (key == "sz") {
        spec.scale_z = value;
      } else if (key == "lapse") {
        spec.lapse = value;
      } else {
        throw std::invalid_argument("ObserverSpec: unknown key '" + key + "'");
      }
    }
  }
  if (spec.family == ObserverFamily::circular &&
      (spec.scale_x != 1.0 || spec.scale_z != 1.0))
    throw std::invalid_argument("ObserverSpec: sx/sz only apply to elliptical");
  spec.validate();
  return spec;
}

std::string ObserverSpec::to_string() const {
  std::ostringstream out;
  out << (family == ObserverFamily::circular ? "circular" : "elliptical");
  out << ":a=" << a_mm << ",s=" << s_mm;
  if (family == ObserverFamily::elliptical)
    out << ",sx=" << scale_x << ",sz=" << scale_z;
  out << ",lapse=" << lapse;
  return out.str();
}

SimulatedObserver::SimulatedObserver(const ObserverSpec& spec, std::uint64_t seed)
    : spec_(spec), rng_(seed) {
  spec_.validate();
}

double SimulatedObserver::p_true(double x_mm, double z_mm) const {
  const double sx = spec_.family == ObserverFamily::elliptical ? spec_.scale_x : 1.0;
  const double sz = spec_.family == ObserverFamily::elliptical ? spec_.scale_z : 1.0;
  const double r_eff = std::hypot(sx * x_mm, sz * z_mm);
  return normal_cdf((r_eff - spec_.a_mm) / spec_.s_mm);
}

double SimulatedObserver::p_response(double x_mm, double z_mm) const {
  const double p = p_true(x_mm, z_mm);
  return p * (1.0 - spec_.lapse) + (1.0 - p) * spec_.lapse;
}

bool SimulatedObserver::respond(double x_mm, double z_mm) {
  return rng_.uniform01() < p_response(x_mm, z_mm);
}

void ExperimentConfig::validate() const {
  limits.validate();
  if (n_init < 25 || n_init > 32)
    throw std::invalid_argument("ExperimentConfig: n_init must lie in [25, 32]");
  if (budget < n_init)
    throw std::invalid_argument("ExperimentConfig: budget must be >= n_init");
  if (!(p_target > 0.5 && p_target < 1.0))
    throw std::invalid_argument("ExperimentConfig: p_target must be in (0.5, 1)");
  if (refit_period < 1)
    throw std::invalid_argument("ExperimentConfig: refit_period must be >= 1");
  if (lattice_n < 2)
    throw std::invalid_argument("ExperimentConfig: lattice_n must be >= 2");
  if (proj_m < 1)
    throw std::invalid_argument("ExperimentConfig: proj_m must be >= 1");
  if (n_angles < 8)
    throw std::invalid_argument("ExperimentConfig: n_angles must be >= 8");
}

std::vector<TrialRecord> ExperimentLog::as_trial_records() const {
  std::vector<TrialRecord> records;
  records.reserve(trials.size());
  for (const LoggedTrial& t : trials)
    records.push_back({subject, condition, t.x_mm, t.z_mm, t.correct});
  return records;
}

std::vector<std::pair<double, double>> init_design(int n_init) {
  if (n_init < 25 || n_init > 32)
    throw std::invalid_argument("init_design: n_init must lie in [25, 32]");
  std::vector<std::pair<double, double>> pts;
  pts.reserve(static_cast<std::size_t>(n_init));
  for (int k = 0; k < 8; ++k) {
    const double th = std::numbers::pi / 4.0 * k;
    pts.emplace_back(0.9 * std::cos(th), 0.9 * std::sin(th));
  }
  std::vector<std::pair<double, double>> grid;
  grid.reserve(25);
  // (xi - 2) * 0.2 lands on sign-symmetric doubles, so equal-radius points
  // tie exactly and the stable sort keeps enumeration order among them
  // (-0.4 + 0.2 * xi would put +0.2 one ulp high and break the ties).
  for (int zi = 0; zi < 5; ++zi)
    for (int xi = 0; xi < 5; ++xi)
      grid.emplace_back(0.2 * (xi - 2), 0.2 * (zi - 2));
  std::stable_sort(grid.begin(), grid.end(), [](const auto& p, const auto& q) {
    return p.first * p.first + p.second * p.second <
           q.first * q.first + q.second * q.second;
  });
  pts.insert(pts.end(), grid.begin(), grid.begin() + (n_init - 8));
  return pts;
}

std::vector<std::pair<double, double>> acquisition_lattice(int n) {
  if (n < 2) throw std::invalid_argument("acquisition_lattice: n must be >= 2");
  std::vector<std::pair<double, double>> lattice;
  lattice.reserve(static_cast<std::size_t>(n) * n);
  for (int zi = 0; zi < n; ++zi)
    for (int xi = 0; xi < n; ++xi)
      lattice.emplace_back(-1.0 + 2.0 * xi / (n - 1), -1.0 + 2.0 * zi / (n - 1));
  return lattice;
}

AcquisitionGrid make_acquisition_grid(int lattice_n, int m) {
  if (m < 1) throw std::invalid_argument("make_acquisition_grid: m must be >= 1");
  AcquisitionGrid grid;
  grid.lattice = acquisition_lattice(lattice_n);
  grid.m = m;
  const std::size_t per = static_cast<std::size_t>(m) + 1;
  grid.ray_points.resize(static_cast<Eigen::Index>(grid.lattice.size() * per), 2);
  Eigen::Index row = 0;
  for (const auto& [x, z] : grid.lattice) {
    const double r = std::hypot(x, z);
    const double th = std::atan2(z, x);
    const double c = std::cos(th), s = std::sin(th);
    for (int i = 0; i <= m; ++i, ++row) {
      const double ri = r * i / m;
      grid.ray_points(row, 0) = ri * c;
      grid.ray_points(row, 1) = ri * s;
    }
  }
  return grid;
}

std::size_t acquire_next(const PosteriorFn& posterior, const AcquisitionGrid& grid,
                         double p_target) {
  const double target_latent = normal_quantile(p_target);
  Eigen::VectorXd mu, var;
  posterior(grid.ray_points, mu, var);
  const Eigen::ArrayXd sd = var.array().max(0.0).sqrt();
  const int per = grid.m + 1;
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.lattice.size(); ++i) {
    const Eigen::Index lo = static_cast<Eigen::Index>(i) * per;
    double mu_hat = -std::numeric_limits<double>::infinity();
    double l = mu_hat, u = mu_hat;
    for (Eigen::Index j = lo; j < lo + per; ++j) {
      mu_hat = std::max(mu_hat, mu[j]);
      l = std::max(l, mu[j] - 2.0 * sd[j]);
      u = std::max(u, mu[j] + 2.0 * sd[j]);
    }
    const double sd_hat = (u - l) / 4.0;
    const double score = 1.96 * sd_hat - std::abs(mu_hat - target_latent);
    if (score > best_score + 1e-15) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

std::size_t acquire_next(const PosteriorFn& posterior,
                         const std::vector<std::pair<double, double>>& lattice,
                         double p_target, int m) {
  const double target_latent = normal_quantile(p_target);
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lattice.size(); ++i) {
    const auto& [x, z] = lattice[i];
    const NormalizedPoint p = to_polar_normalized(x, z);
    const ProjectedPosterior proj = monotone_project(posterior, p.r, p.theta, m);
    const double score = 1.96 * proj.sd_hat - std::abs(proj.mu_hat - target_latent);
    if (score > best_score + 1e-15) {
      best_score = score;
      best = i;
    }
  }
  return best;
}

ExperimentResult run_experiment(const ObserverSpec& spec, const ExperimentConfig& config,
                                const std::string& subject,
                                const std::string& condition) {
  spec.validate();
  config.validate();
  SimulatedObserver observer(spec, config.seed);

  ExperimentResult result;
  result.log.subject = subject;
  result.log.condition = condition;
  result.log.limits = config.limits;
  result.log.p_target = config.p_target;
  result.log.seed = config.seed;
  auto& trials = result.log.trials;
  trials.reserve(static_cast<std::size_t>(config.budget));

  Eigen::MatrixX2d x(config.budget, 2);
  Eigen::VectorXd y(config.budget);
  const auto log_trial = [&](double xn, double zn, TrialPhase phase) {
    const double x_mm = xn * config.limits.lx_mm;
    const double z_mm = zn * config.limits.lz_mm;
    const bool correct = observer.respond(x_mm, z_mm);
    const int idx = static_cast<int>(trials.size());
    trials.push_back({idx, phase, xn, zn, x_mm, z_mm, correct});
    x(idx, 0) = xn;
    x(idx, 1) = zn;
    y[idx] = correct ? 1.0 : -1.0;
  };

  for (const auto& [xn, zn] : init_design(config.n_init))
    log_trial(xn, zn, TrialPhase::init);

  const auto seen_x = [&] { return x.topRows(static_cast<Eigen::Index>(trials.size())); };
  const auto seen_y = [&] { return y.head(static_cast<Eigen::Index>(trials.size())); };

  GpHyperparams hp = optimize_hyperparams(seen_x(), seen_y(), GpHyperparams{});
  GpModel model;
  model.fit(seen_x(), seen_y(), hp);

  const AcquisitionGrid grid = make_acquisition_grid(config.lattice_n, config.proj_m);
  const PosteriorFn posterior = model_posterior_fn(model);
  int since_refit = 0;
  while (static_cast<int>(trials.size()) < config.budget) {
    const std::size_t pick = acquire_next(posterior, grid, config.p_target);
    const auto& [xn, zn] = grid.lattice[pick];
    log_trial(xn, zn, TrialPhase::adaptive);
    if (++since_refit >= config.refit_period) {
      hp = optimize_hyperparams(seen_x(), seen_y(), hp);
      since_refit = 0;
    }
    model.fit(seen_x(), seen_y(), hp);
  }

  result.hyperparams = hp;
  result.contour = extract_contour(posterior, config.limits, config.p_target,
                                   config.n_angles, config.proj_m);
  return result;
}

}  // namespace wlr
