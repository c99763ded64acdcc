#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "epochsa/domain.hpp"
#include "epochsa/rng.hpp"
#include "epochsa/vector.hpp"

namespace epochsa {

enum class ProblemKind { LeastSquares, Logistic };

std::string to_string(ProblemKind kind);

/// Certified problem constants. kappa is always L / lambda.
struct ConstantsCertificate {
  double L = 0.0;       // smoothness of every sampled loss over W
  double lambda = 0.0;  // strong convexity of the expected risk over W
  double kappa = 0.0;
  double G = 0.0;       // almost-sure gradient bound over W
  double F_star = 0.0;  // minimal risk
  bool F_star_is_exact = true;
  double F_star_std_error = 0.0;

  /// Builds a certificate, deriving kappa and validating positivity.
  static ConstantsCertificate make(double L, double lambda, double G,
                                   double F_star, bool exact,
                                   double F_star_std_error = 0.0);
};

/// One random function f ~ P.
struct SampledLoss {
  ProblemKind kind = ProblemKind::LeastSquares;
  Vector x;
  double y = 0.0;
  double regularization = 0.0;  // Logistic only

  double value(const Vector& w) const;
  Vector grad(const Vector& w) const;
  void grad_into(const Vector& w, Vector& out) const;
};

double loss_value(const SampledLoss& f, const Vector& w);
Vector loss_grad(const SampledLoss& f, const Vector& w);

/// What the solvers consume: a domain and one stochastic gradient per draw.
class GradientOracle {
 public:
  virtual ~GradientOracle() = default;
  virtual const BallDomain& domain() const = 0;
  /// Draws a fresh f from the stream and writes grad f(w) into `out`.
  virtual void sample_gradient(const Vector& w, Rng& rng, Vector& out) const = 0;
};

struct RiskEstimate {
  double value = 0.0;
  double std_error = 0.0;  // zero when the risk is exact
};

/// Fixed, seed-determined sample set backing the Logistic expected risk.
struct LogisticPool {
  std::size_t dim = 0;
  std::vector<double> xs;  // row-major, size() * dim
  std::vector<double> ys;
  // d = 2 only: pool means of cos(n psi_j) and sin(n psi_j), where psi_j is
  // the angle of -y_j x_j. Lets the risk be summed in O(harmonics^2).
  std::vector<double> harmonic_cos;
  std::vector<double> harmonic_sin;
  std::size_t size() const { return ys.size(); }
};

/// A stochastic optimization instance with certified constants.
class ProblemSpec : public GradientOracle {
 public:
  ProblemKind kind() const { return kind_; }
  std::size_t dimension() const { return domain_.dimension(); }
  const BallDomain& domain() const override { return domain_; }
  const Vector& w_star() const { return w_star_; }
  const ConstantsCertificate& certificate() const { return cert_; }
  double noise_halfwidth() const { return noise_halfwidth_; }
  const Vector& scale_diagonal() const { return scale_diagonal_; }
  double regularization() const { return regularization_; }
  std::uint64_t seed() const { return seed_; }
  /// Logistic label-generating direction (distinct from the risk minimizer).
  const Vector& latent() const { return latent_; }
  /// Logistic evaluation pool; null for LeastSquares.
  const LogisticPool* pool() const { return pool_.get(); }

  SampledLoss sample_loss(Rng& rng) const;
  void sample_gradient(const Vector& w, Rng& rng, Vector& out) const override;

  /// F(w). Throws std::domain_error when w is outside W.
  double expected_risk(const Vector& w) const;
  RiskEstimate risk_estimate(const Vector& w) const;
  /// F(w) without the membership check; used for unconstrained runs.
  RiskEstimate risk_estimate_unchecked(const Vector& w) const;
  /// F(w) - F*, computed without cancellation for LeastSquares. `checked`
  /// enforces w in W.
  RiskEstimate excess_risk(const Vector& w, bool checked = true) const;
  /// grad F(w): closed form for LeastSquares, pool average for Logistic.
  Vector risk_gradient(const Vector& w) const;

  /// Copy with the certificate replaced, e.g. to test a miscertified spec.
  ProblemSpec with_certificate(const ConstantsCertificate& cert) const;

 private:
  friend ProblemSpec make_least_squares(std::size_t, const Vector&, double,
                                        double, std::uint64_t);
  friend struct LogisticBuilder;

  ProblemSpec(ProblemKind kind, BallDomain domain);
  double quadratic_excess(const Vector& w) const;

  ProblemKind kind_;
  BallDomain domain_;
  Vector w_star_;
  ConstantsCertificate cert_;
  double noise_halfwidth_ = 0.0;
  Vector scale_diagonal_;
  double regularization_ = 0.0;
  std::uint64_t seed_ = 0;
  Vector latent_;
  double sharpness_ = 0.0;
  std::shared_ptr<const LogisticPool> pool_;
};

/// x = diag(D) z with z uniform on the unit sphere, y = x'w* + eps,
/// eps ~ U[-a, a]. W is the origin-centred ball of radius B and
/// ||w*|| = B/2.
ProblemSpec make_least_squares(std::size_t d, const Vector& D, double B,
                               double noise_halfwidth, std::uint64_t seed);

struct LogisticOptions {
  std::size_t pool_size = 100000;
  std::size_t f_star_draws = 1000000;
  double sharpness = 4.0;
};

/// x uniform on the unit sphere, P(y = +1) = sigmoid(s * x'u) for a latent
/// u with ||u|| = B/2, and f(w) = log(1 + exp(-y x'w)) + mu/2 ||w||^2.
ProblemSpec make_logistic(std::size_t d, double B, double mu, std::uint64_t seed,
                          const LogisticOptions& options = {});

struct VarianceEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Unbiased estimate of E||g - E g||^2 at w from n fresh draws (n >= 2).
VarianceEstimate estimate_grad_variance(const ProblemSpec& spec, const Vector& w,
                                        std::size_t n, Rng& rng);

/// Uniform point in the ball.
Vector random_point_in(const BallDomain& domain, Rng& rng);

}  // namespace epochsa
