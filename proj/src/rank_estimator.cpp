#include "specrank/rank_estimator.hpp"

#include <algorithm>
#include <cmath>

#include "specrank/errors.hpp"
#include "specrank/random.hpp"
#include "specrank/rmt_bounds.hpp"

namespace specrank {

namespace {

// Sub-stream indices of cfg.seed.
enum Stream : std::uint64_t { kEigen = 0, kNoise = 1, kFirst = 2, kSecond = 3 };

Eigen::Index lowest_argmax(const Eigen::VectorXd& v, const IndexInterval& r) {
  Eigen::Index best = r.begin;
  for (Eigen::Index i = r.begin; i < r.end; ++i)
    if (v(i) > v(best)) best = i;
  return best;
}

double noise_bound_at(const SpectrumEstimate& s, double sigma2, double gamma4,
                      double confidence) {
  try {
    const EntryMoments mom = EntryMoments::for_shape(
        s.n, s.p, sigma2, gamma4 * sigma2 * sigma2);
    return gershgorin_upper(mom, confidence).lambda_max_bound;
  } catch (const Error&) {
    return 0.0;
  }
}

}  // namespace

void RankConfig::validate() const {
  if (!(delta >= 0.0) || delta > 1.0) throw DomainError("delta must lie in [0, 1]");
  if (!(confidence > 0.0) || !(confidence < 1.0))
    throw DomainError("confidence must lie in (0, 1)");
  if (!(gamma4 >= 1.0)) throw DomainError("gamma4 must be at least 1");
  if (sweeps < 1 || burnin < 0)
    throw DomainError("sweeps must be positive and burn-in non-negative");
  if (!(prior_start >= 0.0) || !(prior_start < 1.0))
    throw DomainError("prior start must lie in [0, 1)");
  if (n_prime && *n_prime < 4) throw DomainError("n_prime must be at least 4");
  if (!(tie_tolerance >= 0.0)) throw DomainError("tie tolerance must be non-negative");
}

IndexInterval trim_alarm(const Eigen::VectorXd& probs, const AlarmOptions& opts) {
  const Eigen::Index len = probs.size();
  const IndexInterval full{0, len};
  if (len < 3) return full;
  const Eigen::Index min_run =
      opts.min_run > 0
          ? opts.min_run
          : std::max<Eigen::Index>(
                5, static_cast<Eigen::Index>(std::ceil(0.2 * static_cast<double>(len))));

  Eigen::Index i = 0;
  while (i < len) {
    if (!(probs(i) < opts.flat)) {
      ++i;
      continue;
    }
    const Eigen::Index start = i;
    while (i < len && probs(i) < opts.flat) ++i;
    if (i - start < min_run) continue;
    bool spikes_only = true;
    for (Eigen::Index j = i; j < len; ++j)
      if (!(probs(j) >= opts.spike)) {
        spikes_only = false;
        break;
      }
    if (spikes_only) return {0, std::max<Eigen::Index>(start, 1)};
  }
  return full;
}

Selection select_k(const Eigen::VectorXd& first, const Eigen::VectorXd& second,
                   double delta, const IndexInterval& trimmed,
                   double tie_tolerance) {
  if (first.size() != second.size())
    throw ShapeMismatch("posterior sequences differ in length");
  if (!(delta >= 0.0) || delta > 1.0) throw DomainError("delta must lie in [0, 1]");
  IndexInterval r{std::max<Eigen::Index>(trimmed.begin, 0),
                  std::min(trimmed.end, first.size())};
  Selection out;
  if (r.size() <= 0) return out;

  const double top2 = second.segment(r.begin, r.size()).maxCoeff();
  for (Eigen::Index i = r.begin; i < r.end; ++i)
    if (second(i) >= top2 - tie_tolerance) out.candidates.push_back(i);

  const double threshold = delta * first.segment(r.begin, r.size()).maxCoeff();
  Eigen::Index chosen = -1;
  for (Eigen::Index i : out.candidates)
    if (first(i) >= threshold) chosen = std::max(chosen, i);
  if (chosen < 0) chosen = lowest_argmax(first, r);
  out.k = chosen + 1;
  return out;
}

Eigen::VectorXd boundary_probs(const PosteriorTrace& trace) {
  if (trace.probs.size() == 0) return {};
  return trace.probs.tail(trace.probs.size() - 1);
}

Eigen::VectorXd second_level_boundaries(const PosteriorTrace& second) {
  const Eigen::Index len = second.probs.size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(len);
  if (len > 1) out.head(len - 1) = second.probs.tail(len - 1);
  return out;
}

NoiseComparison compare_to_noise(const DataMatrix& input, const RankConfig& cfg) {
  cfg.validate();
  const DataMatrix m = input.centered ? input : center_columns(input);
  EigenOptions eo;
  eo.seed = derive_seed(cfg.seed, kEigen);
  eo.method = cfg.eigen_method;
  NoiseComparison out;
  out.spectrum = compute_spectrum(m, cfg.n_prime.value_or(0), eo);
  if (out.spectrum.n_prime < 4)
    throw DomainError("rank estimation needs at least four eigenvalues");
  out.sigma2 = estimate_noise_variance(out.spectrum, cfg.noise);
  Rng rng(derive_seed(cfg.seed, kNoise));
  // The observed values are the top n_prime of free_side eigenvalues, so the
  // noise reference is the top n_prime of as many draws.
  const Eigen::Index n_prime = out.spectrum.n_prime;
  const Eigen::Index draws = std::max(n_prime, out.spectrum.free_side());
  out.noise_samples =
      mp_sample(draws, noise_model(out.spectrum, out.sigma2), rng).head(n_prime);
  return out;
}

RankDecision estimate_rank(const DataMatrix& input, const RankConfig& cfg) {
  cfg.validate();
  const DataMatrix m = input.centered ? input : center_columns(input);
  RankDecision d;
  NoiseComparison cmp;
  try {
    cmp = compare_to_noise(m, cfg);
  } catch (const DegenerateSpectrum&) {
    if (m.values.squaredNorm() > 0.0) throw;
    d.n_prime = cfg.n_prime ? std::min(*cfg.n_prime, std::min(m.n(), m.p()))
                            : default_n_prime(m.n(), m.p());
    d.eigenvalues = Eigen::VectorXd::Zero(d.n_prime);
    d.warnings.emplace_back("matrix is zero; no signal dimensions");
    return d;
  }
  const SpectrumEstimate& spectrum = cmp.spectrum;
  d.n_prime = spectrum.n_prime;
  d.eigenvalues = spectrum.eigenvalues;
  d.sigma2_used = cmp.sigma2;
  d.noise_bound = noise_bound_at(spectrum, d.sigma2_used, cfg.gamma4, cfg.confidence);
  d.noise_samples = std::move(cmp.noise_samples);
  d.deviation = d.eigenvalues - d.noise_samples;

  if (d.noise_samples(0) > d.eigenvalues(0)) {
    d.warnings.emplace_back(
        "largest noise sample exceeds the largest eigenvalue; no signal dimensions");
    return d;
  }

  BcpOptions bo;
  bo.sweeps = cfg.sweeps;
  bo.burnin = cfg.burnin;
  const Eigen::VectorXd prior = linear_prior(spectrum.n_prime, cfg.prior_start);
  d.first_trace = bcp_posterior(d.deviation, prior, derive_seed(cfg.seed, kFirst), bo);
  d.second_trace = double_posterior(d.first_trace, derive_seed(cfg.seed, kSecond), bo,
                                    cfg.prior_start);

  const Eigen::VectorXd first = boundary_probs(d.first_trace);
  const Eigen::VectorXd second = second_level_boundaries(d.second_trace);
  d.trimmed_range = trim_alarm(first, cfg.alarm);
  const Eigen::VectorXd kept = first.segment(0, d.trimmed_range.end);
  if (!(kept.maxCoeff() >= cfg.alarm.flat)) {
    d.warnings.emplace_back("posterior is flat; no signal dimensions");
    return d;
  }
  if (d.trimmed_range.end < first.size())
    d.warnings.emplace_back("alarm trimmed the posterior after boundary " +
                            std::to_string(d.trimmed_range.end));

  const Selection sel =
      select_k(first, second, cfg.delta, d.trimmed_range, cfg.tie_tolerance);
  d.k = sel.k;
  for (Eigen::Index j : sel.candidates) d.candidates.push_back(j + 1);
  return d;
}

}  // namespace specrank
