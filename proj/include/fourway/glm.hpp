#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

namespace fourway {

struct DesignMatrix {
  Eigen::MatrixXd values;  // n x p
  std::vector<std::string> labels;

  // Index of the all-ones column; throws ValidationError if there is none.
  Eigen::Index intercept_column() const;
  // Throws ValidationError on non-finite entries, label mismatch or a missing
  // intercept.
  void validate() const;
};

struct LogisticFit {
  Eigen::VectorXd coefficients;
  std::vector<std::string> labels;
  bool converged = false;
  int iterations = 0;
  double deviance = 0.0;
  double max_abs_score = 0.0;
  double ridge = 0.0;
};

inline constexpr double kScoreTolerance = 1e-8;
// Converged means max |score| < kScoreTolerance. Three successive steps with
// relative objective change below kRelativeDevianceTolerance and no real
// score improvement stop the iteration early, unconverged.
inline constexpr double kRelativeDevianceTolerance = 1e-10;
inline constexpr int kMaxIterations = 100;
inline constexpr double kProbabilityClamp = 1e-12;

// Maximises the binomial log-likelihood minus (ridge/2) * |beta|^2, where the
// penalty skips the intercept column. Newton-Raphson (IRLS) with step-halving.
// Throws FitError on rank deficiency (unpenalised fits), constant outcome, or
// detected separation. Non-convergence is reported through `converged`.
LogisticFit fit_logistic(const DesignMatrix& design, std::span<const double> y, double ridge = 0.0);

// Penalised log-likelihood and its gradient (the score) at beta.
double penalized_loglik(const DesignMatrix& design, std::span<const double> y,
                        const Eigen::VectorXd& beta, double ridge);
Eigen::VectorXd penalized_score(const DesignMatrix& design, std::span<const double> y,
                                const Eigen::VectorXd& beta, double ridge);

// Inverse logit clamped to [1e-12, 1 - 1e-12].
double inverse_logit(double eta);

double predict_prob(const LogisticFit& fit, std::span<const double> x);

}  // namespace fourway
