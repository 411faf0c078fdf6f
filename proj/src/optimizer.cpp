#include "cpcm/optimizer.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "cpcm/error.hpp"
#include "cpcm/random.hpp"
#include "cpcm/selection.hpp"

namespace cpcm {

using copula::Family;
using likelihood::Evaluation;
using likelihood::Order;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kMonotoneSlack = 1e-12;
constexpr double kTieTolerance = 1e-9;
constexpr int kMaxRidgeDoublings = 200;

struct Box {
  Vector6 lo;
  Vector6 hi;

  Vector6 project(const Vector6& x) const { return x.cwiseMax(lo).cwiseMin(hi); }
};

Box make_box(Family family, const NewtonConfig& cfg) {
  double a_lo, a_hi;
  if (family == Family::Clayton) {
    const double alpha_min = cfg.allow_negative_clayton ? -0.999 : cfg.clayton_alpha_min;
    a_lo = std::log1p(alpha_min);
    a_hi = std::log1p(cfg.clayton_alpha_max);
  } else {
    a_lo = std::log(1e-6);
    a_hi = std::log(999.0);
  }
  const double k_lo = std::log(1e-3);
  const double k_hi = std::log(1e3);
  Box box;
  box.lo << k_lo, k_lo, -kInf, -kInf, a_lo, a_lo;
  box.hi << k_hi, k_hi, kInf, kInf, a_hi, a_hi;
  return box;
}

// Coordinates held at a bound because the gradient points outward.
Eigen::Array<bool, 6, 1> free_mask(const Vector6& x, const Vector6& g, const Box& box) {
  Eigen::Array<bool, 6, 1> free;
  for (int i = 0; i < 6; ++i) {
    free[i] = !((x[i] <= box.lo[i] && g[i] < 0.0) || (x[i] >= box.hi[i] && g[i] > 0.0));
  }
  return free;
}

// Ascent direction solving (-H + mu I) d = G on the free coordinates.
Vector6 newton_direction(const Evaluation& ev, const Eigen::Array<bool, 6, 1>& free,
                         double ridge_base) {
  std::vector<int> idx;
  for (int i = 0; i < 6; ++i) {
    if (free[i]) idx.push_back(i);
  }
  Vector6 d = Vector6::Zero();
  if (idx.empty()) return d;
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd a(n, n);
  Eigen::VectorXd g(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    g[r] = ev.gradient[idx[r]];
    for (Eigen::Index c = 0; c < n; ++c) a(r, c) = -ev.hessian(idx[r], idx[c]);
  }
  double mu = 0.0;
  for (int attempt = 0; attempt <= kMaxRidgeDoublings; ++attempt) {
    Eigen::LLT<Eigen::MatrixXd> llt(a + mu * Eigen::MatrixXd::Identity(n, n));
    if (llt.info() == Eigen::Success) {
      const Eigen::VectorXd step = llt.solve(g);
      if (step.allFinite()) {
        for (Eigen::Index r = 0; r < n; ++r) d[idx[r]] = step[r];
        return d;
      }
    }
    mu = mu == 0.0 ? std::max(ridge_base, std::numeric_limits<double>::min()) : 2.0 * mu;
  }
  throw SingularHessian("Hessian could not be regularized (ridge reached " + std::to_string(mu) +
                        ")");
}

double projected_norm(const Vector6& g, const Eigen::Array<bool, 6, 1>& free) {
  double m = 0.0;
  for (int i = 0; i < 6; ++i) {
    if (free[i]) m = std::max(m, std::abs(g[i]));
  }
  return m;
}

struct Segment {
  double mean;
  double cv;
};

Segment segment_stats(std::span<const double> xs) {
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  const double var = xs.size() > 1 ? ss / (n - 1.0) : 0.0;
  return {mean, std::sqrt(var) / mean};
}

std::pair<int, int> tau_range(std::size_t length, const NewtonConfig& cfg) {
  const int t_max = static_cast<int>(length) - 3;
  const int lo = cfg.tau_min > 0 ? cfg.tau_min : 3;
  const int hi = cfg.tau_max > 0 ? cfg.tau_max : t_max;
  if (lo < 3 || hi > t_max || lo > hi) {
    throw DomainError("tau range [" + std::to_string(lo) + ", " + std::to_string(hi) +
                      "] is not inside {3,...," + std::to_string(t_max) + "}");
  }
  return {lo, hi};
}

}  // namespace

void NewtonConfig::validate() const {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be > 0");
  if (max_iters < 1) throw DomainError("max_iters must be >= 1");
  if (!(ridge_base >= 0.0)) throw DomainError("ridge_base must be >= 0");
  if (max_halvings < 1) throw DomainError("max_halvings must be >= 1");
  if (!(gradient_tolerance > 0.0)) throw DomainError("gradient_tolerance must be > 0");
  if (!(clayton_alpha_min > -1.0) || !(clayton_alpha_max > clayton_alpha_min)) {
    throw DomainError("invalid Clayton alpha bounds");
  }
  if (tau_min < 0 || tau_max < 0 || (tau_min > 0 && tau_max > 0 && tau_min > tau_max)) {
    throw DomainError("invalid tau range");
  }
}

ModelParams default_init(const Series& series, ChangePoint cp, Family family, double alpha01) {
  const auto tau = static_cast<std::size_t>(cp.tau());
  const auto values = series.values();
  const Segment s0 = segment_stats(values.subspan(0, tau));
  const Segment s1 = segment_stats(values.subspan(tau));
  ModelParams p{weibull::match_moments(s0.mean, s0.cv), weibull::match_moments(s1.mean, s1.cv),
                2.0, 2.0, alpha01, family};
  p.validate();
  return p;
}

InnerFit fit_at_tau(const Series& series, ChangePoint cp, Family family, double alpha01,
                    const std::optional<ModelParams>& init, const NewtonConfig& cfg) {
  cfg.validate();
  const ChangePoint checked(cp.tau(), series.size());
  const ModelParams start = init ? *init : default_init(series, checked, family, alpha01);
  if (start.family != family) throw DomainError("initial parameters use a different family");

  const Box box = make_box(family, cfg);
  const auto eval = [&](const Vector6& x) {
    return likelihood::evaluate(series, TransformedParams::from_vector(x), checked, family,
                                alpha01, Order::Hessian);
  };

  ModelParams start_params = start;
  start_params.alpha01 = alpha01;
  Vector6 x = box.project(likelihood::transform(start_params).as_vector());
  Evaluation ev = eval(x);
  InnerFit out{likelihood::untransform(TransformedParams::from_vector(x), family, alpha01),
               ev.value, false, 0, {}};

  for (int iter = 0; iter < cfg.max_iters; ++iter) {
    const auto free = free_mask(x, ev.gradient, box);
    const Vector6 d = newton_direction(ev, free, cfg.ridge_base);
    if (projected_norm(ev.gradient, free) < cfg.gradient_tolerance &&
        d.cwiseAbs().maxCoeff() < cfg.epsilon) {
      out.converged = true;
      break;
    }

    bool accepted = false;
    double t = 1.0;
    Vector6 x_new;
    Evaluation ev_new;
    for (int h = 0; h <= cfg.max_halvings && !accepted; ++h, t *= 0.5) {
      x_new = box.project(x + t * d);
      try {
        ev_new = eval(x_new);
      } catch (const DomainError&) {
        continue;
      }
      accepted = ev_new.value >= ev.value - kMonotoneSlack;
    }
    if (!accepted) {
      throw NonConvergence("tau=" + std::to_string(cp.tau()) +
                           ": step halving exhausted at iteration " + std::to_string(iter + 1));
    }
    out.trace.push_back((x_new - x).cwiseAbs().maxCoeff());
    ++out.iterations;
    x = x_new;
    ev = ev_new;
  }
  if (!out.converged) {
    throw NonConvergence("tau=" + std::to_string(cp.tau()) + ": no convergence in " +
                         std::to_string(cfg.max_iters) + " iterations");
  }
  out.params = likelihood::untransform(TransformedParams::from_vector(x), family, alpha01);
  out.loglik = ev.value;
  return out;
}

FitResult profile_fit(const Series& series, Family family, double alpha01,
                      const NewtonConfig& cfg) {
  cfg.validate();
  if (series.size() < 7) {
    throw DomainError("profile fit needs T >= 7, got T=" + std::to_string(series.size()));
  }
  const auto [lo, hi] = tau_range(series.size(), cfg);
  const auto count = static_cast<std::size_t>(hi - lo + 1);
  std::vector<std::optional<InnerFit>> fits(count);

  const auto attempt = [&](int tau, const std::optional<ModelParams>& init) {
    std::optional<InnerFit> fit;
    try {
      fit = fit_at_tau(series, ChangePoint(tau, series.size()), family, alpha01, init, cfg);
    } catch (const Error&) {
    }
    return fit;
  };

  if (cfg.warm_start) {
    std::optional<ModelParams> previous;
    for (std::size_t i = 0; i < count; ++i) {
      const int tau = lo + static_cast<int>(i);
      fits[i] = attempt(tau, previous);
      if (!fits[i] && previous) fits[i] = attempt(tau, std::nullopt);
      previous = fits[i] ? std::optional(fits[i]->params) : std::nullopt;
    }
  } else {
    parallel_for(count, cfg.workers,
                 [&](std::size_t i) { fits[i] = attempt(lo + static_cast<int>(i), std::nullopt); });
  }

  std::vector<ProfilePoint> profile(count);
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < count; ++i) {
    profile[i] = {lo + static_cast<int>(i), fits[i] ? fits[i]->loglik : -kInf};
    if (fits[i] && (!best || fits[i]->loglik > fits[*best]->loglik + kTieTolerance)) best = i;
  }
  if (!best) {
    throw AllProfilesFailed("no converged fit for any tau in [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
  }

  // Guard against warm-start path dependence at the chosen tau.
  const int tau_hat = lo + static_cast<int>(*best);
  if (cfg.warm_start) {
    auto fresh = attempt(tau_hat, std::nullopt);
    if (fresh && fresh->loglik > fits[*best]->loglik + kTieTolerance) {
      fits[*best] = std::move(fresh);
      profile[*best].loglik = fits[*best]->loglik;
    }
  }

  InnerFit& fit = *fits[*best];
  return {fit.params,
          ChangePoint(tau_hat, series.size()),
          fit.loglik,
          aic(fit.loglik, kDefaultParameterCount),
          fit.converged,
          fit.iterations,
          std::move(profile),
          std::move(fit.trace)};
}

}  // namespace cpcm
