#include "fourway/glm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fourway/error.hpp"

namespace fourway {

namespace {

// Objective increases this small (relative) are rounding noise, not ascent;
// rejecting them would stall Newton just short of the score tolerance.
constexpr double kDescentSlack = 1e-12;

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

Eigen::Map<const Eigen::VectorXd> as_vector(std::span<const double> y) {
  return {y.data(), static_cast<Eigen::Index>(y.size())};
}

double deviance_of(const Eigen::VectorXd& eta, const Eigen::Map<const Eigen::VectorXd>& y) {
  double dev = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    dev += y[i] > 0.5 ? softplus(-eta[i]) : softplus(eta[i]);
  }
  return 2.0 * dev;
}

Eigen::VectorXd penalty_mask(Eigen::Index p, Eigen::Index intercept) {
  Eigen::VectorXd mask = Eigen::VectorXd::Ones(p);
  mask[intercept] = 0.0;
  return mask;
}

}  // namespace

Eigen::Index DesignMatrix::intercept_column() const {
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    if ((values.col(j).array() == 1.0).all()) return j;
  }
  throw ValidationError("design matrix has no intercept column");
}

void DesignMatrix::validate() const {
  if (static_cast<Eigen::Index>(labels.size()) != values.cols()) {
    throw ValidationError("design matrix labels do not match its columns");
  }
  if (!values.allFinite()) throw ValidationError("design matrix has non-finite entries");
  intercept_column();
}

double inverse_logit(double eta) {
  return std::clamp(sigmoid(eta), kProbabilityClamp, 1.0 - kProbabilityClamp);
}

double penalized_loglik(const DesignMatrix& design, std::span<const double> y,
                        const Eigen::VectorXd& beta, double ridge) {
  const auto yv = as_vector(y);
  const Eigen::VectorXd eta = design.values * beta;
  const Eigen::VectorXd mask = penalty_mask(beta.size(), design.intercept_column());
  return -0.5 * deviance_of(eta, yv) - 0.5 * ridge * beta.cwiseProduct(mask).squaredNorm();
}

Eigen::VectorXd penalized_score(const DesignMatrix& design, std::span<const double> y,
                                const Eigen::VectorXd& beta, double ridge) {
  const auto yv = as_vector(y);
  const Eigen::VectorXd eta = design.values * beta;
  Eigen::VectorXd resid(eta.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) resid[i] = yv[i] - sigmoid(eta[i]);
  const Eigen::VectorXd mask = penalty_mask(beta.size(), design.intercept_column());
  return design.values.transpose() * resid - ridge * beta.cwiseProduct(mask);
}

LogisticFit fit_logistic(const DesignMatrix& design, std::span<const double> y, double ridge) {
  design.validate();
  const Eigen::MatrixXd& X = design.values;
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (static_cast<Eigen::Index>(y.size()) != n) throw ValidationError("outcome length does not match design rows");
  if (n < p) throw FitError("fewer rows than columns in design (" + std::to_string(n) + " < " + std::to_string(p) + ")");
  if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw ValidationError("ridge must be a finite nonnegative number");

  const auto yv = as_vector(y);
  double events = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (yv[i] != 0.0 && yv[i] != 1.0) throw ValidationError("outcome must be 0/1");
    events += yv[i];
  }
  if (events == 0.0 || events == static_cast<double>(n)) {
    throw FitError(std::string("degenerate outcome (all ") + (events == 0.0 ? "0" : "1") +
                   "): the unpenalised intercept diverges; no ridge can rescue this fit");
  }

  const Eigen::Index intercept = design.intercept_column();
  if (ridge == 0.0) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) {
      std::ostringstream os;
      os << "rank-deficient design (rank " << qr.rank() << " of " << p << "); dependent columns:";
      for (Eigen::Index j = qr.rank(); j < p; ++j) {
        os << ' ' << design.labels[static_cast<std::size_t>(qr.colsPermutation().indices()[j])];
      }
      throw FitError(os.str());
    }
  }

  const Eigen::VectorXd mask = penalty_mask(p, intercept);
  LogisticFit fit;
  fit.labels = design.labels;
  fit.ridge = ridge;
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  const double ybar = events / static_cast<double>(n);
  beta[intercept] = std::log(ybar / (1.0 - ybar));

  auto objective = [&](const Eigen::VectorXd& eta, const Eigen::VectorXd& b) {
    return deviance_of(eta, yv) + ridge * b.cwiseProduct(mask).squaredNorm();
  };

  Eigen::VectorXd eta = X * beta;
  double obj = objective(eta, beta);
  Eigen::VectorXd prob(n), resid(n), weight(n);
  auto refresh = [&] {
    for (Eigen::Index i = 0; i < n; ++i) {
      prob[i] = sigmoid(eta[i]);
      resid[i] = yv[i] - prob[i];
      weight[i] = prob[i] * (1.0 - prob[i]);
    }
  };
  refresh();
  Eigen::VectorXd score = X.transpose() * resid - ridge * beta.cwiseProduct(mask);

  int iter = 0;
  int stalled = 0;
  double last_score = score.cwiseAbs().maxCoeff();
  bool converged = score.cwiseAbs().maxCoeff() < kScoreTolerance;
  while (!converged && iter < kMaxIterations) {
    ++iter;
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(p, p);
    const Eigen::MatrixXd weighted = X.array().colwise() * weight.array().sqrt();
    info.selfadjointView<Eigen::Lower>().rankUpdate(weighted.transpose());
    info = info.selfadjointView<Eigen::Lower>();
    info.diagonal() += ridge * mask;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    Eigen::VectorXd step = ldlt.solve(score);
    if (!step.allFinite()) break;

    double scale = 1.0;
    Eigen::VectorXd candidate = beta + step;
    Eigen::VectorXd cand_eta = X * candidate;
    double cand_obj = objective(cand_eta, candidate);
    int halvings = 0;
    while (!(cand_obj <= obj + kDescentSlack * (std::abs(obj) + 1.0)) && halvings < 50) {
      scale *= 0.5;
      ++halvings;
      candidate = beta + scale * step;
      cand_eta = X * candidate;
      cand_obj = objective(cand_eta, candidate);
    }
    if (!(cand_obj <= obj + kDescentSlack * (std::abs(obj) + 1.0))) break;  // no descent possible

    const double rel_change = std::abs(obj - cand_obj) / (std::abs(cand_obj) + 0.1);
    beta = candidate;
    eta = cand_eta;
    obj = cand_obj;
    refresh();
    score = X.transpose() * resid - ridge * beta.cwiseProduct(mask);
    const double max_score = score.cwiseAbs().maxCoeff();
    converged = max_score < kScoreTolerance;
    // Near the optimum the deviance barely moves while Newton still shrinks
    // the score, so a flat deviance only ends the loop once the score has
    // stopped improving too (rounding floor).
    const bool flat = rel_change < kRelativeDevianceTolerance && max_score > 0.5 * last_score;
    stalled = flat ? stalled + 1 : 0;
    last_score = max_score;
    if (stalled >= 3) break;
  }

  fit.coefficients = beta;
  fit.iterations = iter;
  fit.deviance = deviance_of(eta, yv);
  fit.max_abs_score = score.cwiseAbs().maxCoeff();
  fit.converged = converged;

  if (ridge == 0.0) {
    const double min_margin = std::min(prob.minCoeff(), (1.0 - prob.array()).minCoeff());
    const double max_coef = beta.cwiseAbs().maxCoeff();
    if (min_margin < 1e-10 && max_coef > 15.0) {
      throw FitError("separation detected: fitted probabilities reach 0 or 1 with diverging coefficients; "
                     "refit with --ridge > 0");
    }
  }
  return fit;
}

double predict_prob(const LogisticFit& fit, std::span<const double> x) {
  if (static_cast<Eigen::Index>(x.size()) != fit.coefficients.size()) {
    throw ValidationError("predictor length " + std::to_string(x.size()) + " does not match " +
                          std::to_string(fit.coefficients.size()) + " coefficients");
  }
  double eta = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) eta += fit.coefficients[static_cast<Eigen::Index>(j)] * x[j];
  return inverse_logit(eta);
}

}  // namespace fourway
