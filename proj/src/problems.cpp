#include "epochsa/problems.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

namespace epochsa {
namespace {

double softplus(double t) { return std::max(t, 0.0) + std::log1p(std::exp(-std::abs(t))); }

double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

// Stream tags for the seed-derived substreams of a spec.
constexpr std::uint64_t kOptimumStream = 1;
constexpr std::uint64_t kPoolStream = 2;
constexpr std::uint64_t kFStarStream = 3;

struct MeanAccumulator {
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t n = 0;
  void add(double v) {
    ++n;
    const double delta = v - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (v - mean);
  }
  double std_error() const {
    if (n < 2) return 0.0;
    return std::sqrt(m2 / static_cast<double>(n - 1) / static_cast<double>(n));
  }
};

double dot_raw(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

// Shifted sums keep the variance accurate without a per-sample division.
RiskEstimate pool_data_term(const LogisticPool& pool, const Vector& w) {
  const std::size_t n = pool.size();
  const std::size_t dim = pool.dim;
  const double* xs = pool.xs.data();
  const double* ys = pool.ys.data();
  const double shift = softplus(-ys[0] * dot_raw(xs, w.values().data(), dim));
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double v = softplus(-ys[j] * dot_raw(xs + j * dim, w.values().data(), dim)) - shift;
    sum += v;
    sum_sq += v * v;
  }
  const double nd = static_cast<double>(n);
  const double mean = sum / nd;
  const double var = std::max(0.0, (sum_sq - nd * mean * mean) / (nd - 1.0));
  return {mean + shift, std::sqrt(var / nd)};
}

constexpr std::size_t kMaxHarmonics = 256;

void fill_harmonics(LogisticPool& pool) {
  if (pool.dim != 2) return;
  pool.harmonic_cos.assign(kMaxHarmonics + 1, 0.0);
  pool.harmonic_sin.assign(kMaxHarmonics + 1, 0.0);
  for (std::size_t j = 0; j < pool.size(); ++j) {
    const double norm = std::hypot(pool.xs[2 * j], pool.xs[2 * j + 1]);
    const double c1 = -pool.ys[j] * pool.xs[2 * j] / norm;
    const double s1 = -pool.ys[j] * pool.xs[2 * j + 1] / norm;
    double c = 1.0;
    double s = 0.0;
    for (std::size_t k = 0; k <= kMaxHarmonics; ++k) {
      pool.harmonic_cos[k] += c;
      pool.harmonic_sin[k] += s;
      const double next_c = c * c1 - s * s1;
      s = s * c1 + c * s1;
      c = next_c;
    }
  }
  for (std::size_t k = 0; k <= kMaxHarmonics; ++k) {
    pool.harmonic_cos[k] /= static_cast<double>(pool.size());
    pool.harmonic_sin[k] /= static_cast<double>(pool.size());
  }
}

// Mean of softplus(z_j . w) over unit z_j in the plane. softplus(r cos t)
// is expanded in a cosine series whose coefficients decay like
// exp(-n asinh(pi / r)); 40 e-folds leave nothing above rounding.
std::optional<double> harmonic_data_mean(const LogisticPool& pool, const Vector& w) {
  if (pool.harmonic_cos.empty()) return std::nullopt;
  const double r = std::hypot(w[0], w[1]);
  if (r == 0.0) return std::log(2.0);
  const std::size_t terms =
      static_cast<std::size_t>(std::ceil(40.0 / std::asinh(M_PI / r))) + 4;
  if (terms > kMaxHarmonics) return std::nullopt;
  const std::size_t nodes = 2 * terms;
  std::vector<double> cosines(nodes);
  std::vector<double> h(nodes);
  for (std::size_t m = 0; m < nodes; ++m) {
    cosines[m] = std::cos(2.0 * M_PI * static_cast<double>(m) / static_cast<double>(nodes));
    h[m] = softplus(r * cosines[m]);
  }
  const double phi = std::atan2(w[1], w[0]);
  double total = 0.0;
  for (std::size_t k = 0; k <= terms; ++k) {
    double a = 0.0;
    for (std::size_t m = 0; m < nodes; ++m) a += h[m] * cosines[(k * m) % nodes];
    a *= (k == 0 ? 1.0 : 2.0) / static_cast<double>(nodes);
    const double kd = static_cast<double>(k);
    total += a * (pool.harmonic_cos[k] * std::cos(kd * phi) +
                  pool.harmonic_sin[k] * std::sin(kd * phi));
  }
  return total;
}

Vector pool_gradient(const LogisticPool& pool, const Vector& w, double mu) {
  Vector g(pool.dim);
  for (std::size_t j = 0; j < pool.size(); ++j) {
    const double* x = &pool.xs[j * pool.dim];
    double xw = 0.0;
    for (std::size_t i = 0; i < pool.dim; ++i) xw += x[i] * w[i];
    const double coeff = -pool.ys[j] * sigmoid(-pool.ys[j] * xw);
    for (std::size_t i = 0; i < pool.dim; ++i) g[i] += coeff * x[i];
  }
  g *= 1.0 / static_cast<double>(pool.size());
  g.axpy(mu, w);
  return g;
}

// Accelerated projected gradient for the mu-strongly convex, L-smooth pool
// risk over the ball.
Vector minimize_pool_risk(const LogisticPool& pool, const BallDomain& domain,
                          double mu, double L) {
  const double q = std::sqrt(mu / L);
  const double momentum = (1.0 - q) / (1.0 + q);
  Vector w = domain.center();
  Vector v = w;
  for (int it = 0; it < 20000; ++it) {
    Vector next = v;
    next.axpy(-1.0 / L, pool_gradient(pool, v, mu));
    project_in_place(domain, next);
    const double step = distance(next, w);
    v = next + momentum * (next - w);
    w = std::move(next);
    if (step < 1e-14) break;
  }
  return w;
}

}  // namespace

std::string to_string(ProblemKind kind) {
  return kind == ProblemKind::LeastSquares ? "least_squares" : "logistic";
}

ConstantsCertificate ConstantsCertificate::make(double L, double lambda, double G,
                                                double F_star, bool exact,
                                                double F_star_std_error) {
  if (!(L > 0.0) || !(lambda > 0.0) || !(G > 0.0)) {
    throw std::invalid_argument("certificate constants L, lambda, G must be positive");
  }
  if (!(F_star >= 0.0)) {
    throw std::invalid_argument("minimal risk must be nonnegative");
  }
  if (lambda > L) {
    throw std::invalid_argument("strong convexity cannot exceed smoothness (kappa >= 1)");
  }
  ConstantsCertificate c;
  c.L = L;
  c.lambda = lambda;
  c.kappa = L / lambda;
  c.G = G;
  c.F_star = F_star;
  c.F_star_is_exact = exact;
  c.F_star_std_error = F_star_std_error;
  return c;
}

double SampledLoss::value(const Vector& w) const {
  const double xw = dot(x, w);
  if (kind == ProblemKind::LeastSquares) {
    const double r = xw - y;
    return r * r;
  }
  return softplus(-y * xw) + 0.5 * regularization * w.squared_norm();
}

void SampledLoss::grad_into(const Vector& w, Vector& out) const {
  const double xw = dot(x, w);
  if (out.size() != w.size()) out = Vector(w.size());
  if (kind == ProblemKind::LeastSquares) {
    const double coeff = 2.0 * (xw - y);
    for (std::size_t i = 0; i < w.size(); ++i) out[i] = coeff * x[i];
    return;
  }
  const double coeff = -y * sigmoid(-y * xw);
  for (std::size_t i = 0; i < w.size(); ++i) {
    out[i] = coeff * x[i] + regularization * w[i];
  }
}

Vector SampledLoss::grad(const Vector& w) const {
  Vector g(w.size());
  grad_into(w, g);
  return g;
}

double loss_value(const SampledLoss& f, const Vector& w) { return f.value(w); }
Vector loss_grad(const SampledLoss& f, const Vector& w) { return f.grad(w); }

ProblemSpec::ProblemSpec(ProblemKind kind, BallDomain domain)
    : kind_(kind), domain_(std::move(domain)) {}

SampledLoss ProblemSpec::sample_loss(Rng& rng) const {
  SampledLoss f;
  f.kind = kind_;
  f.x = uniform_on_sphere(dimension(), rng);
  if (kind_ == ProblemKind::LeastSquares) {
    for (std::size_t i = 0; i < f.x.size(); ++i) f.x[i] *= scale_diagonal_[i];
    const double eps = uniform(-noise_halfwidth_, noise_halfwidth_, rng);
    f.y = dot(f.x, w_star_) + eps;
  } else {
    const double prob_pos = sigmoid(sharpness_ * dot(f.x, latent_));
    f.y = uniform(0.0, 1.0, rng) < prob_pos ? 1.0 : -1.0;
    f.regularization = regularization_;
  }
  return f;
}

void ProblemSpec::sample_gradient(const Vector& w, Rng& rng, Vector& out) const {
  sample_loss(rng).grad_into(w, out);
}

double ProblemSpec::quadratic_excess(const Vector& w) const {
  const double d = static_cast<double>(dimension());
  double q = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double e = w[i] - w_star_[i];
    q += scale_diagonal_[i] * scale_diagonal_[i] * e * e / d;
  }
  return q;
}

RiskEstimate ProblemSpec::risk_estimate_unchecked(const Vector& w) const {
  require_same_dimension(w, w_star_);
  require_finite(w, "risk argument");
  if (kind_ == ProblemKind::LeastSquares) return {quadratic_excess(w) + cert_.F_star, 0.0};
  RiskEstimate r = pool_data_term(*pool_, w);
  if (auto exact = harmonic_data_mean(*pool_, w)) r.value = *exact;
  r.value += 0.5 * regularization_ * w.squared_norm();
  return r;
}

RiskEstimate ProblemSpec::excess_risk(const Vector& w, bool checked) const {
  if (kind_ == ProblemKind::LeastSquares) {
    require_same_dimension(w, w_star_);
    require_finite(w, "risk argument");
    if (checked && !domain_.contains(w)) {
      throw std::domain_error("excess_risk: point outside the domain");
    }
    return {quadratic_excess(w), 0.0};
  }
  RiskEstimate r = checked ? risk_estimate(w) : risk_estimate_unchecked(w);
  r.value -= cert_.F_star;
  return r;
}

RiskEstimate ProblemSpec::risk_estimate(const Vector& w) const {
  require_same_dimension(w, w_star_);
  if (!domain_.contains(w)) {
    throw std::domain_error("expected_risk: point outside the domain");
  }
  return risk_estimate_unchecked(w);
}

double ProblemSpec::expected_risk(const Vector& w) const {
  if (kind_ == ProblemKind::LeastSquares) return risk_estimate(w).value;
  require_same_dimension(w, w_star_);
  if (!domain_.contains(w)) {
    throw std::domain_error("expected_risk: point outside the domain");
  }
  require_finite(w, "risk argument");
  const auto exact = harmonic_data_mean(*pool_, w);
  const double data = exact ? *exact : pool_data_term(*pool_, w).value;
  return data + 0.5 * regularization_ * w.squared_norm();
}

Vector ProblemSpec::risk_gradient(const Vector& w) const {
  require_same_dimension(w, w_star_);
  if (kind_ == ProblemKind::LeastSquares) {
    const double d = static_cast<double>(dimension());
    Vector g(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      g[i] = 2.0 * scale_diagonal_[i] * scale_diagonal_[i] * (w[i] - w_star_[i]) / d;
    }
    return g;
  }
  return pool_gradient(*pool_, w, regularization_);
}

ProblemSpec ProblemSpec::with_certificate(const ConstantsCertificate& cert) const {
  ProblemSpec copy = *this;
  copy.cert_ = ConstantsCertificate::make(cert.L, cert.lambda, cert.G, cert.F_star,
                                          cert.F_star_is_exact, cert.F_star_std_error);
  return copy;
}

ProblemSpec make_least_squares(std::size_t d, const Vector& D, double B,
                               double noise_halfwidth, std::uint64_t seed) {
  if (d == 0) throw std::invalid_argument("dimension must be >= 1");
  if (D.size() != d) throw std::invalid_argument("scale diagonal must have dimension d");
  for (double v : D.values()) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("scale diagonal entries must be positive");
    }
  }
  if (!(noise_halfwidth >= 0.0) || !std::isfinite(noise_halfwidth)) {
    throw std::invalid_argument("noise half-width must be nonnegative");
  }
  ProblemSpec spec(ProblemKind::LeastSquares, BallDomain(Vector(d), B));
  spec.seed_ = seed;
  spec.scale_diagonal_ = D;
  spec.noise_halfwidth_ = noise_halfwidth;

  Rng rng(derive_seed(seed, kOptimumStream, 0));
  spec.w_star_ = (B / 2.0) * uniform_on_sphere(d, rng);

  const auto [dmin, dmax] = std::minmax_element(D.values().begin(), D.values().end());
  const double lo = *dmin;
  const double hi = *dmax;
  const double y_max = hi * B / 2.0 + noise_halfwidth;
  spec.cert_ = ConstantsCertificate::make(
      2.0 * hi * hi, 2.0 * lo * lo / static_cast<double>(d),
      2.0 * hi * (hi * B + y_max), noise_halfwidth * noise_halfwidth / 3.0, true);
  return spec;
}

struct LogisticBuilder {
  static ProblemSpec build(std::size_t d, double B, double mu, std::uint64_t seed,
                           const LogisticOptions& opt) {
    if (d == 0) throw std::invalid_argument("dimension must be >= 1");
    if (!(mu > 0.0) || !std::isfinite(mu)) {
      throw std::invalid_argument("logistic regularization must be positive");
    }
    if (opt.pool_size < 2 || opt.f_star_draws < 2) {
      throw std::invalid_argument("logistic pool and F* sample sizes must be >= 2");
    }
    ProblemSpec spec(ProblemKind::Logistic, BallDomain(Vector(d), B));
    spec.seed_ = seed;
    spec.regularization_ = mu;
    spec.scale_diagonal_ = Vector(d, 1.0);

    Rng opt_rng(derive_seed(seed, kOptimumStream, 0));
    spec.latent_ = (B / 2.0) * uniform_on_sphere(d, opt_rng);
    spec.sharpness_ = opt.sharpness;

    const double L = 0.25 + mu;
    // provisional certificate so sample_loss can be used while building
    spec.cert_ = ConstantsCertificate::make(L, mu, 1.0 + mu * B, 0.0, false);
    spec.w_star_ = Vector(d);

    auto pool = std::make_shared<LogisticPool>();
    pool->dim = d;
    pool->xs.reserve(opt.pool_size * d);
    pool->ys.reserve(opt.pool_size);
    Rng pool_rng(derive_seed(seed, kPoolStream, 0));
    for (std::size_t j = 0; j < opt.pool_size; ++j) {
      SampledLoss f = spec.sample_loss(pool_rng);
      pool->xs.insert(pool->xs.end(), f.x.values().begin(), f.x.values().end());
      pool->ys.push_back(f.y);
    }
    fill_harmonics(*pool);
    spec.pool_ = pool;
    spec.w_star_ = minimize_pool_risk(*pool, spec.domain_, mu, L);

    Rng fresh(derive_seed(seed, kFStarStream, 0));
    MeanAccumulator acc;
    for (std::size_t j = 0; j < opt.f_star_draws; ++j) {
      acc.add(spec.sample_loss(fresh).value(spec.w_star_));
    }
    spec.cert_ = ConstantsCertificate::make(L, mu, 1.0 + mu * B, acc.mean, false,
                                            acc.std_error());
    return spec;
  }
};

ProblemSpec make_logistic(std::size_t d, double B, double mu, std::uint64_t seed,
                          const LogisticOptions& options) {
  return LogisticBuilder::build(d, B, mu, seed, options);
}

VarianceEstimate estimate_grad_variance(const ProblemSpec& spec, const Vector& w,
                                        std::size_t n, Rng& rng) {
  if (n < 2) throw std::invalid_argument("variance estimate needs n >= 2");
  if (!spec.domain().contains(w)) {
    throw std::domain_error("estimate_grad_variance: point outside the domain");
  }
  const std::size_t d = spec.dimension();
  std::vector<Vector> grads;
  grads.reserve(n);
  RunningAverage mean(d);
  for (std::size_t j = 0; j < n; ++j) {
    grads.push_back(spec.sample_loss(rng).grad(w));
    mean.add(grads.back());
  }
  const double nd = static_cast<double>(n);
  MeanAccumulator acc;
  for (const Vector& g : grads) {
    acc.add(squared_distance(g, mean.mean()) * nd / (nd - 1.0));
  }
  return {acc.mean, acc.std_error()};
}

Vector random_point_in(const BallDomain& domain, Rng& rng) {
  const std::size_t d = domain.dimension();
  const double r = domain.radius() *
                   std::pow(uniform(0.0, 1.0, rng), 1.0 / static_cast<double>(d));
  Vector w = uniform_on_sphere(d, rng);
  w *= r;
  w += domain.center();
  return w;
}

}  // namespace epochsa
