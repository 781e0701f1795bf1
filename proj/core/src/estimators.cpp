#include "prevint/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "prevint/numerics.hpp"

namespace prevint {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

PrevalenceEstimate failed_estimate(Method method) {
  PrevalenceEstimate est;
  est.value = kNan;
  est.raw_value = kNan;
  est.failed = true;
  est.method = method;
  return est;
}

PrevalenceEstimate clipped_estimate(double raw, Method method) {
  PrevalenceEstimate est;
  est.raw_value = raw;
  est.value = clamp01(raw);
  est.clipped = raw < 0.0 || raw > 1.0;
  est.method = method;
  return est;
}

double median_sorted(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

// Mean of |a_i - b_j| over all pairs, via sorting and prefix sums.
double mean_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) return 0.0;
  std::vector<double> sorted_b(b.begin(), b.end());
  std::sort(sorted_b.begin(), sorted_b.end());
  std::vector<double> prefix(sorted_b.size() + 1, 0.0);
  for (std::size_t i = 0; i < sorted_b.size(); ++i) prefix[i + 1] = prefix[i] + sorted_b[i];
  const double nb = static_cast<double>(sorted_b.size());
  const double total_b = prefix.back();

  double total = 0.0;
  for (double v : a) {
    const auto it = std::upper_bound(sorted_b.begin(), sorted_b.end(), v);
    const double k = static_cast<double>(it - sorted_b.begin());
    const double below = prefix[static_cast<std::size_t>(k)];
    total += v * k - below + (total_b - below) - v * (nb - k);
  }
  return total / (static_cast<double>(a.size()) * nb);
}

QuadratureSpec population_window(const BinormalParams& params, double abs_tolerance = 1e-10) {
  QuadratureSpec spec;
  spec.lower_bound = std::min(params.mu, params.nu) - 8.0 * params.sigma;
  spec.upper_bound = std::max(params.mu, params.nu) + 8.0 * params.sigma;
  spec.abs_tolerance = abs_tolerance;
  spec.max_subdivisions = 2000;
  return spec;
}

constexpr double kInvGolden = 0.6180339887498949;

double golden_minimise(const std::function<double(double)>& f, double lo, double hi,
                       double tolerance) {
  double x1 = hi - kInvGolden * (hi - lo);
  double x2 = lo + kInvGolden * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tolerance) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvGolden * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvGolden * (hi - lo);
      f2 = f(x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

const std::array<Method, 10>& all_methods() {
  static const std::array<Method, 10> methods = {
      Method::acc50,    Method::acc_p,      Method::acc_v,      Method::median_sweep,
      Method::apcc,     Method::apcc_v,     Method::hellinger4, Method::hellinger8,
      Method::energy,   Method::max_likelihood};
  return methods;
}

std::string_view method_tag(Method method) {
  switch (method) {
    case Method::acc50: return "ACC50";
    case Method::acc_p: return "ACCp";
    case Method::acc_v: return "ACCv";
    case Method::median_sweep: return "MS";
    case Method::apcc: return "APCC";
    case Method::apcc_v: return "APCCv";
    case Method::hellinger4: return "H4";
    case Method::hellinger8: return "H8";
    case Method::energy: return "Energy";
    case Method::max_likelihood: return "ML";
  }
  return "?";
}

std::optional<Method> parse_method_tag(std::string_view tag) {
  for (Method m : all_methods()) {
    if (tag == method_tag(m)) return m;
  }
  if (tag == "MLboot" || tag == "MLinf") return Method::max_likelihood;
  return std::nullopt;
}

std::vector<double> hellinger_bin_boundaries(double mu, double nu, double sigma, int bins) {
  if (bins < 2) throw std::invalid_argument("hellinger bins must be >= 2");
  std::vector<double> boundaries;
  boundaries.reserve(bins - 1);
  const double centre = 0.5 * (mu + nu);
  for (int i = 1; i < bins; ++i) {
    boundaries.push_back(sigma * normal_quantile(static_cast<double>(i) / bins) + centre);
  }
  return boundaries;
}

namespace {

std::size_t bin_index(const std::vector<double>& boundaries, double x) {
  // Bin i is the half-open cell (l_{i-1}, l_i]; lower_bound gives the first
  // boundary >= x, whose index is exactly the cell number.
  return static_cast<std::size_t>(
      std::lower_bound(boundaries.begin(), boundaries.end(), x) - boundaries.begin());
}

std::vector<double> empirical_bin_probs(const std::vector<double>& boundaries,
                                        const std::vector<double>& values, double floor_value) {
  std::vector<double> probs(boundaries.size() + 1, 0.0);
  for (double v : values) probs[bin_index(boundaries, v)] += 1.0;
  const double n = static_cast<double>(values.size());
  double total = 0.0;
  for (double& p : probs) {
    p = std::max(p / n, floor_value);
    total += p;
  }
  for (double& p : probs) p /= total;
  return probs;
}

}  // namespace

HellingerBinModel make_hellinger_bin_model(const TrainingContext& ctx, int bins) {
  HellingerBinModel model;
  if (ctx.is_infinite()) {
    const BinormalParams& pop = ctx.population();
    model.boundaries = hellinger_bin_boundaries(pop.mu, pop.nu, pop.sigma, bins);
    model.pos_probs.resize(bins);
    model.neg_probs.resize(bins);
    for (int i = 0; i < bins; ++i) {
      const double hi = i + 1 < bins ? normal_cdf(model.boundaries[i], pop.nu, pop.sigma) : 1.0;
      const double lo = i > 0 ? normal_cdf(model.boundaries[i - 1], pop.nu, pop.sigma) : 0.0;
      model.pos_probs[i] = hi - lo;
      const double hi_n = i + 1 < bins ? normal_cdf(model.boundaries[i], pop.mu, pop.sigma) : 1.0;
      const double lo_n = i > 0 ? normal_cdf(model.boundaries[i - 1], pop.mu, pop.sigma) : 0.0;
      model.neg_probs[i] = hi_n - lo_n;
    }
  } else {
    const LabeledSample& sample = ctx.sample();
    const double m = static_cast<double>(sample.size());
    double mean_pos = 0.0, mean_neg = 0.0;
    for (double x : sample.positives) mean_pos += x;
    for (double x : sample.negatives) mean_neg += x;
    mean_pos /= static_cast<double>(sample.positives.size());
    mean_neg /= static_cast<double>(sample.negatives.size());
    double ss = 0.0;
    for (double x : sample.positives) ss += (x - mean_pos) * (x - mean_pos);
    for (double x : sample.negatives) ss += (x - mean_neg) * (x - mean_neg);
    const double dof = std::max(m - 2.0, 1.0);
    const double pooled_sd = std::sqrt(std::max(ss / dof, 1e-12));

    model.boundaries = hellinger_bin_boundaries(mean_neg, mean_pos, pooled_sd, bins);
    // Floor avoids sqrt kinks at empty bins that would stall the minimiser.
    const double floor_value = 1.0 / (2.0 * m);
    model.pos_probs = empirical_bin_probs(model.boundaries, sample.positives, floor_value);
    model.neg_probs = empirical_bin_probs(model.boundaries, sample.negatives, floor_value);
  }
  return model;
}

double hellinger_objective(const HellingerBinModel& model, const std::vector<double>& test_freqs,
                           double q) {
  double total = 0.0;
  for (std::size_t i = 0; i < test_freqs.size(); ++i) {
    const double mix = q * model.pos_probs[i] + (1.0 - q) * model.neg_probs[i];
    const double d = std::sqrt(test_freqs[i]) - std::sqrt(std::max(mix, 0.0));
    total += d * d;
  }
  return total;
}

double hellinger_prevalence_from_histogram(const HellingerBinModel& model,
                                           const std::vector<double>& test_freqs) {
  if (test_freqs.size() != model.pos_probs.size())
    throw std::invalid_argument("hellinger: frequency vector does not match bin count");
  double best_q = 0.0;
  double best_value = kInf;
  for (int i = 0; i <= 100; ++i) {
    const double q = static_cast<double>(i) / 100.0;
    const double value = hellinger_objective(model, test_freqs, q);
    if (value < best_value) {
      best_value = value;
      best_q = q;
    }
  }
  const double lo = std::max(0.0, best_q - 0.01);
  const double hi = std::min(1.0, best_q + 0.01);
  return golden_minimise([&](double q) { return hellinger_objective(model, test_freqs, q); }, lo,
                         hi, 1e-6);
}

PrevalenceEstimate energy_prevalence_from_unit_values(std::span<const double> test_values,
                                                      std::span<const double> positive_values,
                                                      std::span<const double> negative_values) {
  PrevalenceEstimate est;
  est.method = Method::energy;
  if (test_values.empty() || positive_values.empty() || negative_values.empty())
    return failed_estimate(Method::energy);

  const double qn = mean_abs_diff(test_values, negative_values);
  const double qp = mean_abs_diff(test_values, positive_values);
  const double nn = mean_abs_diff(negative_values, negative_values);
  const double pp = mean_abs_diff(positive_values, positive_values);
  const double pn = mean_abs_diff(positive_values, negative_values);

  const double a = qn - qp - nn + pn;
  const double b = 2.0 * pn - nn - pp;
  if (!(b > 1e-14)) return failed_estimate(Method::energy);
  est = clipped_estimate(a / b, Method::energy);
  est.clipped = false;  // the constrained minimiser is the clamped value itself
  return est;
}

PrevalenceEstimate estimate_ml_from_ratios(std::span<const double> ratios) {
  const Method method = Method::max_likelihood;
  if (ratios.empty()) return failed_estimate(method);

  double mean_ratio = 0.0, mean_inverse = 0.0, max_dev = 0.0;
  double max_ratio = -kInf, min_ratio = kInf;
  for (double r : ratios) {
    mean_ratio += r;
    mean_inverse += 1.0 / r;
    max_dev = std::max(max_dev, std::fabs(r - 1.0));
    max_ratio = std::max(max_ratio, r);
    min_ratio = std::min(min_ratio, r);
  }
  const double n = static_cast<double>(ratios.size());
  mean_ratio /= n;
  mean_inverse /= n;
  if (max_dev < 1e-12) return failed_estimate(method);

  const auto score = [&](double q) {
    double s = 0.0;
    for (double r : ratios) s += (r - 1.0) / (q * (r - 1.0) + 1.0);
    return s;
  };
  const auto bisect = [&](double lo, double hi) {
    // The score is strictly decreasing, so a plain bisection is safe.
    for (int i = 0; i < 100 && hi - lo > 1e-10; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (score(mid) >= 0.0)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  };

  PrevalenceEstimate est;
  est.method = method;
  if (mean_ratio <= 1.0) {
    est.value = 0.0;
    est.clipped = mean_ratio < 1.0;
    if (est.clipped) {
      est.raw_value = max_ratio > 1.0 ? bisect((-1.0 / (max_ratio - 1.0)) * (1.0 - 1e-9), 0.0)
                                      : -kInf;
    } else {
      est.raw_value = 0.0;
    }
    return est;
  }
  if (mean_inverse <= 1.0) {
    est.value = 1.0;
    est.clipped = mean_inverse < 1.0;
    if (est.clipped) {
      est.raw_value = min_ratio < 1.0
                          ? bisect(1.0, 1.0 + (1.0 / (1.0 - min_ratio) - 1.0) * (1.0 - 1e-9))
                          : kInf;
    } else {
      est.raw_value = 1.0;
    }
    return est;
  }

  const double root = bisect(0.0, 1.0);
  est.value = root;
  est.raw_value = root;
  return est;
}

std::optional<double> ml_asymptotic_variance(const PrevalenceEstimate& estimate,
                                             std::span<const double> ratios) {
  if (estimate.failed || ratios.empty()) return std::nullopt;
  const double q = estimate.value;
  double denom = 0.0;
  for (double r : ratios) {
    const double term = (r - 1.0) / (q * (r - 1.0) + 1.0);
    denom += term * term;
  }
  if (denom <= 0.0) return std::nullopt;
  return static_cast<double>(ratios.size()) / denom;
}

MethodEngine::MethodEngine(const TrainingContext& ctx, const PosteriorModel& model)
    : ctx_(&ctx), model_(model) {}

ClassifierRates MethodEngine::rates(double threshold) const {
  const auto it = rates_cache_.find(threshold);
  if (it != rates_cache_.end()) return it->second;
  const ClassifierRates r = rates_for_threshold(*ctx_, model_, threshold);
  rates_cache_.emplace(threshold, r);
  return r;
}

PosteriorMeans MethodEngine::means(std::optional<double> pi) const {
  const double key = pi.value_or(-1.0);
  const auto it = means_cache_.find(key);
  if (it != means_cache_.end()) return it->second;
  const PosteriorMeans m = means_for_posterior(*ctx_, model_, pi);
  means_cache_.emplace(key, m);
  return m;
}

PrevalenceEstimate MethodEngine::adjusted_count(std::span<const double> test,
                                                double threshold) const {
  if (model_.slope == 0.0 || test.empty()) return failed_estimate(Method::acc50);
  const ClassifierRates r = rates(threshold);
  const double denom = r.denominator();
  if (denom == 0.0) return failed_estimate(Method::acc50);

  const double cutoff = threshold_cutoff(model_, threshold);
  const bool upper_side = model_.slope < 0.0;
  std::size_t count = 0;
  if (upper_side) {
    for (double x : test) count += x >= cutoff ? 1 : 0;
  } else {
    for (double x : test) count += x <= cutoff ? 1 : 0;
  }
  const double rate = static_cast<double>(count) / static_cast<double>(test.size());
  return clipped_estimate((rate - r.fpr) / denom, Method::acc50);
}

std::optional<double> MethodEngine::min_variance_threshold(std::span<const double> test) const {
  if (model_.slope == 0.0 || test.empty()) return std::nullopt;
  const bool upper_side = model_.slope < 0.0;
  std::optional<double> best;
  double best_value = kInf;
  for (double t : probability_grid()) {
    const ClassifierRates r = rates(t);
    const double denom = r.denominator();
    if (denom == 0.0) continue;
    const double cutoff = threshold_cutoff(model_, t);
    std::size_t count = 0;
    if (upper_side) {
      for (double x : test) count += x >= cutoff ? 1 : 0;
    } else {
      for (double x : test) count += x <= cutoff ? 1 : 0;
    }
    // Continuity-corrected exceedance frequency: an observed count of 0 or n
    // must not make the variance plug-in vanish, otherwise every degenerate
    // extreme threshold would win the sweep outright.
    const double n = static_cast<double>(test.size());
    const double rate = (static_cast<double>(count) + 0.5) / (n + 1.0);
    const double value = rate * (1.0 - rate) / (denom * denom);
    if (value < best_value) {  // strict: ties resolve to the smaller threshold
      best_value = value;
      best = t;
    }
  }
  return best;
}

PrevalenceEstimate MethodEngine::median_sweep(std::span<const double> test) const {
  if (model_.slope == 0.0 || test.empty()) return failed_estimate(Method::median_sweep);
  const bool upper_side = model_.slope < 0.0;
  std::vector<double> estimates;
  for (double t : probability_grid()) {
    const ClassifierRates r = rates(t);
    const double denom = r.denominator();
    if (!(denom > 0.25)) continue;
    const double cutoff = threshold_cutoff(model_, t);
    std::size_t count = 0;
    if (upper_side) {
      for (double x : test) count += x >= cutoff ? 1 : 0;
    } else {
      for (double x : test) count += x <= cutoff ? 1 : 0;
    }
    const double rate = static_cast<double>(count) / static_cast<double>(test.size());
    estimates.push_back(clamp01((rate - r.fpr) / denom));
  }
  if (estimates.empty()) return failed_estimate(Method::median_sweep);
  PrevalenceEstimate est;
  est.method = Method::median_sweep;
  est.value = median_sorted(estimates);
  est.raw_value = est.value;
  return est;
}

double MethodEngine::posterior_mean_over(std::span<const double> test, double intercept) const {
  double sum = 0.0;
  for (double x : test) sum += sigmoid(-(model_.slope * x + intercept));
  return sum / static_cast<double>(test.size());
}

PrevalenceEstimate MethodEngine::probabilistic_count(std::span<const double> test,
                                                     std::optional<double> pi) const {
  if (model_.slope == 0.0 || test.empty()) return failed_estimate(Method::apcc);
  const PosteriorMeans m = means(pi);
  const double denom = m.denominator();
  if (denom == 0.0) return failed_estimate(Method::apcc);
  const double b = pi ? model_.intercept_for_prior(*pi) : model_.intercept;
  const double mean_h = posterior_mean_over(test, b);
  return clipped_estimate((mean_h - m.mean_negative) / denom, Method::apcc);
}

std::optional<double> MethodEngine::min_variance_prior(std::span<const double> test) const {
  if (model_.slope == 0.0 || test.empty()) return std::nullopt;
  std::optional<double> best;
  double best_value = kInf;
  for (double pi : probability_grid()) {
    const PosteriorMeans m = means(pi);
    const double denom = m.denominator();
    if (denom == 0.0) continue;
    const double b = model_.intercept_for_prior(pi);
    double sum = 0.0, sum_sq = 0.0;
    for (double x : test) {
      const double h = sigmoid(-(model_.slope * x + b));
      sum += h;
      sum_sq += h * h;
    }
    const double n = static_cast<double>(test.size());
    const double mean = sum / n;
    const double variance = std::max(sum_sq / n - mean * mean, 0.0);
    const double value = variance / (denom * denom);
    if (value < best_value) {
      best_value = value;
      best = pi;
    }
  }
  return best;
}

const HellingerBinModel& MethodEngine::hellinger_model(int bins) const {
  auto it = hellinger_cache_.find(bins);
  if (it == hellinger_cache_.end()) {
    it = hellinger_cache_.emplace(bins, make_hellinger_bin_model(*ctx_, bins)).first;
  }
  return it->second;
}

PrevalenceEstimate MethodEngine::hellinger(std::span<const double> test, int bins) const {
  const Method method = bins == 4 ? Method::hellinger4 : Method::hellinger8;
  if (test.empty()) return failed_estimate(method);
  const HellingerBinModel& model = hellinger_model(bins);
  std::vector<double> freqs(model.pos_probs.size(), 0.0);
  for (double x : test) freqs[bin_index(model.boundaries, x)] += 1.0;
  for (double& f : freqs) f /= static_cast<double>(test.size());

  PrevalenceEstimate est;
  est.method = method;
  est.value = hellinger_prevalence_from_histogram(model, freqs);
  est.raw_value = est.value;
  return est;
}

const std::vector<double>& MethodEngine::training_posteriors(bool positive_class) const {
  auto& cache = positive_class ? train_h_pos_ : train_h_neg_;
  if (!cache) {
    const auto& values = positive_class ? ctx_->sample().positives : ctx_->sample().negatives;
    std::vector<double> h;
    h.reserve(values.size());
    for (double x : values) h.push_back(model_.posterior(x));
    cache = std::move(h);
  }
  return *cache;
}

const MethodEngine::EnergyTrainingTerms& MethodEngine::energy_training_terms() const {
  if (!energy_terms_) {
    EnergyTrainingTerms terms;
    const BinormalParams& pop = ctx_->population();
    const QuadratureSpec spec = population_window(pop);
    const auto h = [&](double x) { return model_.posterior(x); };
    const PosteriorMeans m = means(std::nullopt);
    const double t_pos = m.mean_positive;
    const double t_neg = m.mean_negative;
    const double u_nn = integrate(
        [&](double x) {
          return normal_pdf(x, pop.mu, pop.sigma) * normal_cdf(x, pop.mu, pop.sigma) * h(x);
        },
        spec);
    const double u_pp = integrate(
        [&](double x) {
          return normal_pdf(x, pop.nu, pop.sigma) * normal_cdf(x, pop.nu, pop.sigma) * h(x);
        },
        spec);
    const double u_np = integrate(
        [&](double x) {
          return normal_pdf(x, pop.mu, pop.sigma) * normal_cdf(x, pop.nu, pop.sigma) * h(x);
        },
        spec);
    const double u_pn = integrate(
        [&](double x) {
          return normal_pdf(x, pop.nu, pop.sigma) * normal_cdf(x, pop.mu, pop.sigma) * h(x);
        },
        spec);
    terms.neg_neg = 4.0 * u_nn - 2.0 * t_neg;
    terms.pos_pos = 4.0 * u_pp - 2.0 * t_pos;
    terms.pos_neg = 2.0 * u_np - t_neg + 2.0 * u_pn - t_pos;
    energy_terms_ = terms;
  }
  return *energy_terms_;
}

void MethodEngine::ensure_energy_point_terms(std::span<const double> test) const {
  std::vector<double> missing;
  for (double x : test) {
    if (energy_points_.find(x) == energy_points_.end()) missing.push_back(x);
  }
  if (missing.empty()) return;
  std::sort(missing.begin(), missing.end());
  missing.erase(std::unique(missing.begin(), missing.end()), missing.end());

  const BinormalParams& pop = ctx_->population();
  const QuadratureSpec window = population_window(pop);
  const PosteriorMeans m = means(std::nullopt);
  const auto h = [&](double x) { return model_.posterior(x); };

  // Cumulative integrals G(x) = int_{-inf}^{x} pdf * h, walked left to right.
  double g_neg = 0.0, g_pos = 0.0;
  double anchor = window.lower_bound;
  for (double x : missing) {
    const double upto = std::min(std::max(x, window.lower_bound), window.upper_bound);
    if (upto > anchor) {
      QuadratureSpec seg;
      seg.lower_bound = anchor;
      seg.upper_bound = upto;
      seg.abs_tolerance = 1e-12;
      seg.max_subdivisions = 400;
      g_neg += integrate([&](double v) { return normal_pdf(v, pop.mu, pop.sigma) * h(v); }, seg);
      g_pos += integrate([&](double v) { return normal_pdf(v, pop.nu, pop.sigma) * h(v); }, seg);
      anchor = upto;
    }
    EnergyPointTerm term;
    const double hx = h(x);
    term.vs_neg = m.mean_negative - 2.0 * g_neg + hx * (2.0 * normal_cdf(x, pop.mu, pop.sigma) - 1.0);
    term.vs_pos = m.mean_positive - 2.0 * g_pos + hx * (2.0 * normal_cdf(x, pop.nu, pop.sigma) - 1.0);
    energy_points_.emplace(x, term);
  }
}

PrevalenceEstimate MethodEngine::energy(std::span<const double> test) const {
  if (model_.slope == 0.0 || test.empty()) return failed_estimate(Method::energy);

  if (!ctx_->is_infinite()) {
    std::vector<double> h_test;
    h_test.reserve(test.size());
    for (double x : test) h_test.push_back(model_.posterior(x));
    PrevalenceEstimate est = energy_prevalence_from_unit_values(
        h_test, training_posteriors(true), training_posteriors(false));
    est.method = Method::energy;
    return est;
  }

  const EnergyTrainingTerms& terms = energy_training_terms();
  ensure_energy_point_terms(test);
  double qn = 0.0, qp = 0.0;
  for (double x : test) {
    const EnergyPointTerm& term = energy_points_.find(x)->second;
    qn += term.vs_neg;
    qp += term.vs_pos;
  }
  const double n = static_cast<double>(test.size());
  qn /= n;
  qp /= n;
  const double a = qn - qp - terms.neg_neg + terms.pos_neg;
  const double b = 2.0 * terms.pos_neg - terms.neg_neg - terms.pos_pos;
  if (!(b > 1e-14)) return failed_estimate(Method::energy);
  PrevalenceEstimate est = clipped_estimate(a / b, Method::energy);
  est.clipped = false;
  return est;
}

std::vector<double> MethodEngine::density_ratios(std::span<const double> test) const {
  std::vector<double> ratios;
  ratios.reserve(test.size());
  if (ctx_->is_infinite()) {
    const BinormalParams& pop = ctx_->population();
    for (double x : test) ratios.push_back(density_ratio(pop, x));
  } else {
    const double p = model_.train_prevalence;
    const double prior_odds = (1.0 - p) / p;
    for (double x : test) {
      const double u = std::clamp(model_.linear(x), -700.0, 700.0);
      ratios.push_back(prior_odds * std::exp(-u));
    }
  }
  return ratios;
}

PrevalenceEstimate MethodEngine::max_likelihood(std::span<const double> test) const {
  if (test.empty()) return failed_estimate(Method::max_likelihood);
  const std::vector<double> ratios = density_ratios(test);
  return estimate_ml_from_ratios(ratios);
}

PrevalenceEstimate MethodEngine::estimate(Method method, std::span<const double> test) const {
  PrevalenceEstimate est;
  switch (method) {
    case Method::acc50:
      est = adjusted_count(test, 0.5);
      break;
    case Method::acc_p:
      est = adjusted_count(test, ctx_->train_prevalence());
      break;
    case Method::acc_v: {
      const std::optional<double> t = min_variance_threshold(test);
      est = t ? adjusted_count(test, *t) : failed_estimate(method);
      break;
    }
    case Method::median_sweep:
      est = median_sweep(test);
      break;
    case Method::apcc:
      est = probabilistic_count(test, std::nullopt);
      break;
    case Method::apcc_v: {
      const std::optional<double> pi = min_variance_prior(test);
      est = pi ? probabilistic_count(test, *pi) : failed_estimate(method);
      break;
    }
    case Method::hellinger4:
      est = hellinger(test, 4);
      break;
    case Method::hellinger8:
      est = hellinger(test, 8);
      break;
    case Method::energy:
      est = energy(test);
      break;
    case Method::max_likelihood:
      est = max_likelihood(test);
      break;
  }
  est.method = method;
  return est;
}

PrevalenceEstimate estimate_acc(const TrainingContext& ctx, const PosteriorModel& model,
                                std::span<const double> test, double threshold) {
  return MethodEngine(ctx, model).adjusted_count(test, threshold);
}

std::optional<double> select_threshold_accv(const TrainingContext& ctx,
                                            const PosteriorModel& model,
                                            std::span<const double> test) {
  return MethodEngine(ctx, model).min_variance_threshold(test);
}

PrevalenceEstimate estimate_ms(const TrainingContext& ctx, const PosteriorModel& model,
                               std::span<const double> test) {
  return MethodEngine(ctx, model).median_sweep(test);
}

PrevalenceEstimate estimate_apcc(const TrainingContext& ctx, const PosteriorModel& model,
                                 std::span<const double> test, std::optional<double> pi) {
  return MethodEngine(ctx, model).probabilistic_count(test, pi);
}

std::optional<double> select_pi_apccv(const TrainingContext& ctx, const PosteriorModel& model,
                                      std::span<const double> test) {
  return MethodEngine(ctx, model).min_variance_prior(test);
}

PrevalenceEstimate estimate_hellinger(const TrainingContext& ctx, std::span<const double> test,
                                      int bins) {
  if (bins != 4 && bins != 8) throw std::invalid_argument("hellinger estimator supports 4 or 8 bins");
  const HellingerBinModel model = make_hellinger_bin_model(ctx, bins);
  const Method method = bins == 4 ? Method::hellinger4 : Method::hellinger8;
  if (test.empty()) {
    PrevalenceEstimate est;
    est.value = kNan;
    est.raw_value = kNan;
    est.failed = true;
    est.method = method;
    return est;
  }
  std::vector<double> freqs(model.pos_probs.size(), 0.0);
  for (double x : test) {
    freqs[static_cast<std::size_t>(std::lower_bound(model.boundaries.begin(),
                                                    model.boundaries.end(), x) -
                                   model.boundaries.begin())] += 1.0;
  }
  for (double& f : freqs) f /= static_cast<double>(test.size());
  PrevalenceEstimate est;
  est.method = method;
  est.value = hellinger_prevalence_from_histogram(model, freqs);
  est.raw_value = est.value;
  return est;
}

PrevalenceEstimate estimate_energy(const TrainingContext& ctx, const PosteriorModel& model,
                                   std::span<const double> test) {
  return MethodEngine(ctx, model).energy(test);
}

PrevalenceEstimate estimate_ml(const TrainingContext& ctx, const PosteriorModel& model,
                               std::span<const double> test) {
  return MethodEngine(ctx, model).max_likelihood(test);
}

}  // namespace prevint
