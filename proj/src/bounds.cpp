#include "epochsa/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace epochsa {
namespace {

void require_step_size(double gamma, double lambda, double L) {
  if (!(gamma > 0.0) || !(lambda > 0.0) || !(L > 0.0)) {
    throw std::invalid_argument("gamma, lambda and L must be positive");
  }
  if (!(gamma < 1.0 / lambda) || !(gamma < 1.0 / L)) {
    throw std::invalid_argument("fixed-step bound requires gamma < 1/lambda and gamma < 1/L");
  }
}

}  // namespace

double theorem1_rhs(double G, double lambda, double kappa, double F_star,
                    double T, double alpha) {
  if (!(alpha > 1.0)) throw std::invalid_argument("alpha > 1 is required");
  const double leading = std::exp2(alpha * alpha + 5.0 * alpha + 5.0) * G * G /
                         (lambda * std::pow(T, alpha));
  const double floor_term = std::exp2(2.0 * alpha + 5.0) * kappa * F_star /
                            ((std::exp2(alpha - 1.0) - 1.0) * T);
  return leading + floor_term;
}

bool theorem1_in_regime(double kappa, double T, double alpha) {
  return T >= std::pow(kappa, alpha);
}

double corollary1_rhs(double G, double lambda, double kappa, double F_star, double T) {
  return theorem1_rhs(G, lambda, kappa, F_star, T, 2.0);
}

double theorem2_rhs(double F0, double F_star, double beta, std::size_t k_dagger) {
  return (F0 - F_star) / std::exp2(static_cast<double>(k_dagger)) + 2.0 * F_star / beta;
}

double epoch_gd_rhs(double G, double lambda, double T) {
  return 32.0 * G * G / (lambda * T);
}

double appendix_contraction(double gamma, double lambda, double L) {
  return 1.0 - 2.0 * gamma * lambda * (1.0 - gamma * L);
}

double appendix_distance_rhs(double gamma, double lambda, double L, double F_star,
                             double T, double dist0_sq) {
  require_step_size(gamma, lambda, L);
  const double c = appendix_contraction(gamma, lambda, L);
  return std::pow(c, T) * dist0_sq +
         4.0 * gamma * L * F_star / (lambda * (1.0 - gamma * L));
}

double appendix_risk_unconstrained_rhs(double gamma, double lambda, double L,
                                       double F_star, double T, double dist0_sq) {
  require_step_size(gamma, lambda, L);
  const double c = appendix_contraction(gamma, lambda, L);
  return 0.5 * L * std::pow(c, T) * dist0_sq +
         2.0 * gamma * L * L * F_star / (lambda * (1.0 - gamma * L));
}

double appendix_risk_constrained_rhs(double gamma, double lambda, double L,
                                     double F_star, double T, double dist0_sq,
                                     double grad_norm_at_optimum) {
  const double D = appendix_distance_rhs(gamma, lambda, L, F_star, T, dist0_sq);
  return grad_norm_at_optimum * std::sqrt(D) + 0.5 * L * D;
}

}  // namespace epochsa
