#pragma once

#include <cstddef>

namespace epochsa {

/// 2^{a^2+5a+5} G^2 / (lambda T^a) + 2^{2a+5} kappa F* / ((2^{a-1} - 1) T).
/// Throws std::invalid_argument for alpha <= 1.
double theorem1_rhs(double G, double lambda, double kappa, double F_star,
                    double T, double alpha);

/// Budget regime T >= kappa^alpha in which theorem1_rhs applies.
bool theorem1_in_regime(double kappa, double T, double alpha);

/// theorem1_rhs at alpha = 2: 2^19 G^2 / (lambda T^2) + 2^9 kappa F* / T.
double corollary1_rhs(double G, double lambda, double kappa, double F_star, double T);

/// (F0 - F*) / 2^k + 2 F* / beta.
double theorem2_rhs(double F0, double F_star, double beta, std::size_t k_dagger);

/// 32 G^2 / (lambda T), the Epoch-GD excess-risk bound.
double epoch_gd_rhs(double G, double lambda, double T);

/// Per-step contraction 1 - 2 gamma lambda (1 - gamma L) of fixed-step SGD.
double appendix_contraction(double gamma, double lambda, double L);

// Fixed-step SGD bounds. All require gamma < 1/lambda and gamma < 1/L and
// throw std::invalid_argument otherwise.

/// E||w_T - w*||^2 <= c^T ||w0 - w*||^2 + 4 gamma L F* / (lambda (1 - gamma L)).
double appendix_distance_rhs(double gamma, double lambda, double L, double F_star,
                             double T, double dist0_sq);

/// Unconstrained risk: L/2 c^T ||w0 - w*||^2 + 2 gamma L^2 F* / (lambda (1 - gamma L)).
double appendix_risk_unconstrained_rhs(double gamma, double lambda, double L,
                                       double F_star, double T, double dist0_sq);

/// Constrained risk: ||grad F(w*)|| sqrt(D) + L/2 D with D the distance bound.
double appendix_risk_constrained_rhs(double gamma, double lambda, double L,
                                     double F_star, double T, double dist0_sq,
                                     double grad_norm_at_optimum);

}  // namespace epochsa
