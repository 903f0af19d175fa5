#include "forrelab/gaussian_lab.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <random>

#include "forrelab/errors.hpp"
#include "forrelab/hadamard.hpp"

namespace forrelab {

namespace {

constexpr double kDependentTol = 1e-12;   // <z|z> at or below this is a dependent query
constexpr double kDecisiveTol = 1e-8;     // consistency slack for determined responses
constexpr double kLogClamp = 500.0;       // decisive log likelihood ratio magnitude

int sign_bit(int x, int y) {
  return std::popcount(static_cast<unsigned>(x & y)) % 2;
}

void check_id(const test_vector_set& vs, int id) {
  if (id < 0 || static_cast<std::size_t>(id) >= vs.count()) {
    throw value_error("vector id outside the test set");
  }
}

double clamp_log(double x) {
  return std::min(kLogClamp, std::max(-kLogClamp, x));
}

}  // namespace

test_vector_set make_forrelation_vectors(int n) {
  if (n < 1 || n > 14) {
    throw resource_error("test vector sets support 1 <= n <= 14");
  }
  return make_kfold_vectors(
      std::vector<double>(std::size_t{1} << n, 1.0));
}

test_vector_set make_kfold_vectors(const std::vector<double>& c) {
  const int n = checked_log2(c.size());
  if (n < 1 || n > 14) {
    throw resource_error("test vector sets support 1 <= n <= 14");
  }
  const double N = static_cast<double>(c.size());
  double norm2 = 0.0;
  for (double v : c) {
    if (!std::isfinite(v)) throw value_error("multiplier entries must be finite");
    norm2 += v * v;
  }
  if (std::abs(norm2 - N) > 1e-6 * N) {
    throw value_error("multiplier vector must satisfy sum c^2 = N");
  }

  test_vector_set vs;
  vs.n = n;
  vs.multipliers = c;
  vs.psi_gram.resize(c.size());
  for (std::size_t x = 0; x < c.size(); ++x) vs.psi_gram[x] = c[x] * c[x];
  fwht_raw_inplace(vs.psi_gram);
  for (double& g : vs.psi_gram) g /= N;

  // exact pairwise bound: cross pairs give |c_x|/sqrt(N), psi pairs give the
  // off-diagonal entries of the psi Gram table, standard pairs give zero
  double eps = 0.0;
  for (double v : c) eps = std::max(eps, std::abs(v) / std::sqrt(N));
  for (std::size_t u = 1; u < c.size(); ++u) {
    eps = std::max(eps, std::abs(vs.psi_gram[u]));
  }
  vs.epsilon_bound = eps;
  return vs;
}

double inner_product(const test_vector_set& vs, int i, int j) {
  check_id(vs, i);
  check_id(vs, j);
  const int N = static_cast<int>(vs.dim());
  const bool pi = i >= N;
  const bool pj = j >= N;
  if (!pi && !pj) return i == j ? 1.0 : 0.0;
  if (pi && pj) return vs.psi_gram[static_cast<std::size_t>((i - N) ^ (j - N))];
  const int x = pi ? j : i;
  const int y = (pi ? i : j) - N;
  const double v = vs.multipliers[static_cast<std::size_t>(x)] /
                   std::sqrt(static_cast<double>(N));
  return sign_bit(x, y) ? -v : v;
}

std::vector<double> materialize_vector(const test_vector_set& vs, int i) {
  check_id(vs, i);
  const int N = static_cast<int>(vs.dim());
  std::vector<double> out(vs.dim(), 0.0);
  if (i < N) {
    out[static_cast<std::size_t>(i)] = 1.0;
    return out;
  }
  const int y = i - N;
  const double r = 1.0 / std::sqrt(static_cast<double>(N));
  for (int x = 0; x < N; ++x) {
    const double v = vs.multipliers[static_cast<std::size_t>(x)] * r;
    out[static_cast<std::size_t>(x)] = sign_bit(x, y) ? -v : v;
  }
  return out;
}

gaussian_oracle make_oracle(const test_vector_set& vs, measure_kind which,
                            rng_t& rng) {
  gaussian_oracle o;
  o.vectors = vs;
  o.which = which;
  o.queried.assign(vs.count(), 0);
  if (which == measure_kind::forrelated) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    o.hidden.resize(vs.dim());
    for (double& v : o.hidden) v = gauss(rng);
    // <psi_y|hidden> for every y in one transform
    o.hidden_psi = o.hidden;
    for (std::size_t x = 0; x < o.hidden_psi.size(); ++x) {
      o.hidden_psi[x] *= vs.multipliers[x];
    }
    fwht_inplace(o.hidden_psi);
  }
  return o;
}

double respond(gaussian_oracle& oracle, int vector_id, rng_t& rng) {
  check_id(oracle.vectors, vector_id);
  auto& seen = oracle.queried[static_cast<std::size_t>(vector_id)];
  if (seen) throw value_error("vector id already queried in this episode");
  seen = 1;
  if (oracle.which == measure_kind::uniform) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    return gauss(rng);
  }
  const int N = static_cast<int>(oracle.vectors.dim());
  if (vector_id < N) return oracle.hidden[static_cast<std::size_t>(vector_id)];
  return oracle.hidden_psi[static_cast<std::size_t>(vector_id - N)];
}

transcript make_transcript(const test_vector_set& vs) {
  transcript tr;
  tr.vectors = vs;
  return tr;
}

query_projection project_query(const transcript& tr, int vector_id) {
  check_id(tr.vectors, vector_id);
  const std::size_t t = tr.size();
  query_projection p;
  p.d.resize(t);
  std::vector<double> g(t);
  for (std::size_t l = 0; l < t; ++l) {
    g[l] = inner_product(tr.vectors, vector_id, tr.ids[l]);
  }
  double used = 0.0;
  for (std::size_t j = 0; j < t; ++j) {
    double dj = 0.0;
    for (std::size_t l = 0; l <= j; ++l) dj += tr.w_coefs[j][l] * g[l];
    p.d[j] = dj;
    p.determined += dj * tr.bs[j];
    p.prediction += dj * tr.cs[j];
    used += dj * dj;
  }
  p.residual_norm2 = 1.0 - used;
  return p;
}

delta_report gs_update(transcript& tr, int vector_id, double response) {
  for (int id : tr.ids) {
    if (id == vector_id) throw value_error("vector id already in the transcript");
  }
  query_projection p = project_query(tr, vector_id);
  if (p.residual_norm2 <= kDependentTol) {
    throw degenerate_query_error(
        "query vector lies in the span of the earlier queries");
  }
  const double beta = 1.0 / std::sqrt(p.residual_norm2);
  const double b = beta * (response - p.determined);
  const double c = response - p.prediction;

  const std::size_t t = tr.size();
  std::vector<double> coefs(t + 1, 0.0);
  coefs[t] = beta;
  for (std::size_t j = 0; j < t; ++j) {
    for (std::size_t l = 0; l <= j; ++l) {
      coefs[l] -= beta * p.d[j] * tr.w_coefs[j][l];
    }
  }

  tr.ids.push_back(vector_id);
  tr.responses.push_back(response);
  tr.betas.push_back(beta);
  tr.bs.push_back(b);
  tr.cs.push_back(c);
  // stored as the prediction itself so that r_i carries no rounding
  // dependence on a_i (mathematically r_i = a_i - c_i)
  tr.rs.push_back(p.prediction);
  tr.v_dot_w.push_back(std::move(p.d));
  tr.w_coefs.push_back(std::move(coefs));
  tr.delta_u += response * response;
  tr.delta_f += b * b;
  tr.delta_f_prime += c * c;
  return summarize(tr);
}

delta_report summarize(const transcript& tr) {
  delta_report rep;
  rep.delta_u = tr.delta_u;
  rep.delta_f = tr.delta_f;
  rep.delta = tr.delta_u - tr.delta_f;
  rep.delta_prime = tr.delta_u - tr.delta_f_prime;
  rep.likelihood_ratio =
      std::exp(std::min(700.0, std::max(-700.0, rep.delta / 2.0)));
  const double t = static_cast<double>(tr.size());
  rep.well_behaved = true;
  if (t > 0) {
    const double cap = std::sqrt(2.0 * std::log(100.0 * t));
    for (double a : tr.responses) {
      if (std::abs(a) > cap) rep.well_behaved = false;
    }
  }
  return rep;
}

std::string to_string(query_strategy s) {
  switch (s) {
    case query_strategy::random_order: return "random-order";
    case query_strategy::alternating: return "alternating";
    case query_strategy::likelihood_greedy: return "likelihood-greedy";
  }
  throw value_error("unknown query strategy");
}

query_strategy strategy_from_string(const std::string& s) {
  if (s == "random-order") return query_strategy::random_order;
  if (s == "alternating") return query_strategy::alternating;
  if (s == "likelihood-greedy") return query_strategy::likelihood_greedy;
  throw value_error("unknown query strategy '" + s + "'");
}

namespace {

// Closed form when the budget covers every vector: the standard-basis
// responses pin down the only candidate hidden vector, and the second family
// either matches it exactly (structured) or almost surely does not (uniform).
episode_result full_coverage_episode(const test_vector_set& vs,
                                     measure_kind truth, rng_t& rng) {
  episode_result ep;
  ep.truth = truth;
  ep.queries = static_cast<int>(vs.count());
  gaussian_oracle oracle = make_oracle(vs, truth, rng);
  const int N = static_cast<int>(vs.dim());

  std::vector<double> reconstructed(vs.dim());
  double delta_u = 0.0;
  for (int x = 0; x < N; ++x) {
    reconstructed[static_cast<std::size_t>(x)] = respond(oracle, x, rng);
    delta_u += reconstructed[static_cast<std::size_t>(x)] *
               reconstructed[static_cast<std::size_t>(x)];
  }
  const double norm2 = delta_u;

  std::vector<double> predicted = reconstructed;
  for (std::size_t x = 0; x < predicted.size(); ++x) {
    predicted[x] *= vs.multipliers[x];
  }
  fwht_inplace(predicted);

  double mismatch = 0.0;
  for (int y = 0; y < N; ++y) {
    const double a = respond(oracle, N + y, rng);
    delta_u += a * a;
    mismatch = std::max(mismatch,
                        std::abs(a - predicted[static_cast<std::size_t>(y)]));
  }
  ep.delta_u = delta_u;
  ep.decisive = true;
  if (mismatch > kDecisiveTol) {
    ep.delta_f = delta_u;  // no exact fit; report the trivial bound
    ep.log_likelihood_ratio = -kLogClamp;
  } else {
    ep.delta_f = norm2;
    ep.log_likelihood_ratio = clamp_log((delta_u - norm2) / 2.0);
  }
  ep.guess_structured = ep.log_likelihood_ratio > 0.0;
  return ep;
}

}  // namespace

episode_result run_episode(const test_vector_set& vs, query_strategy strategy,
                           int t, measure_kind truth, rng_t& rng) {
  if (t < 1) throw value_error("query budget must be positive");
  if (static_cast<std::size_t>(t) > vs.count()) {
    throw value_error("query budget exceeds the test set size");
  }
  if (static_cast<std::size_t>(t) == vs.count()) {
    return full_coverage_episode(vs, truth, rng);
  }

  episode_result ep;
  ep.truth = truth;
  gaussian_oracle oracle = make_oracle(vs, truth, rng);
  transcript tr = make_transcript(vs);

  const int M = static_cast<int>(vs.count());
  const int N = static_cast<int>(vs.dim());
  std::vector<int> order;
  if (strategy == query_strategy::random_order) {
    order.resize(static_cast<std::size_t>(M));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
  } else if (strategy == query_strategy::alternating) {
    std::vector<int> std_ids(static_cast<std::size_t>(N));
    std::vector<int> psi_ids(static_cast<std::size_t>(N));
    std::iota(std_ids.begin(), std_ids.end(), 0);
    std::iota(psi_ids.begin(), psi_ids.end(), N);
    std::shuffle(std_ids.begin(), std_ids.end(), rng);
    std::shuffle(psi_ids.begin(), psi_ids.end(), rng);
    for (int i = 0; i < N; ++i) {
      order.push_back(std_ids[static_cast<std::size_t>(i)]);
      order.push_back(psi_ids[static_cast<std::size_t>(i)]);
    }
  }

  std::vector<char> used(static_cast<std::size_t>(M), 0);
  double log_lr = 0.0;
  for (int step = 0; step < t; ++step) {
    int id = -1;
    if (strategy == query_strategy::likelihood_greedy) {
      if (step == 0) {
        std::uniform_int_distribution<int> pick(0, M - 1);
        id = pick(rng);
      } else {
        double best = -1.0;
        for (int cand = 0; cand < M; ++cand) {
          if (used[static_cast<std::size_t>(cand)]) continue;
          const query_projection p = project_query(tr, cand);
          if (std::abs(p.prediction) > best) {
            best = std::abs(p.prediction);
            id = cand;
          }
        }
      }
    } else {
      id = order[static_cast<std::size_t>(step)];
    }
    used[static_cast<std::size_t>(id)] = 1;

    const double a = respond(oracle, id, rng);
    const query_projection p = project_query(tr, id);
    if (p.residual_norm2 <= kDependentTol) {
      // the affine constraints already determine this response exactly
      ep.decisive = true;
      log_lr = (std::abs(a - p.determined) > kDecisiveTol) ? -kLogClamp
                                                           : kLogClamp;
      tr.delta_u += a * a;
      break;
    }
    gs_update(tr, id, a);
  }

  const delta_report rep = summarize(tr);
  ep.delta_u = tr.delta_u;
  ep.delta_f = rep.delta_f;
  ep.queries = static_cast<int>(tr.size()) + (ep.decisive ? 1 : 0);
  ep.log_likelihood_ratio = ep.decisive ? log_lr : clamp_log(rep.delta / 2.0);
  ep.guess_structured = ep.log_likelihood_ratio > 0.0;
  return ep;
}

bias_report run_distinguisher(const test_vector_set& vs,
                              query_strategy strategy, int t, int trials,
                              rng_t& rng) {
  if (trials < 1) throw value_error("trial count must be positive");
  bias_report rep;
  rep.trials_per_case = trials;
  int hits_structured = 0;
  int hits_independent = 0;
  for (int trial = 0; trial < trials; ++trial) {
    if (run_episode(vs, strategy, t, measure_kind::forrelated, rng)
            .guess_structured) {
      ++hits_structured;
    }
    if (run_episode(vs, strategy, t, measure_kind::uniform, rng)
            .guess_structured) {
      ++hits_independent;
    }
  }
  rep.rate_structured = static_cast<double>(hits_structured) / trials;
  rep.rate_independent = static_cast<double>(hits_independent) / trials;
  rep.bias = std::abs(rep.rate_structured - rep.rate_independent);
  const double v1 = rep.rate_structured * (1.0 - rep.rate_structured);
  const double v0 = rep.rate_independent * (1.0 - rep.rate_independent);
  rep.standard_error = std::sqrt((v1 + v0) / trials);
  return rep;
}

}  // namespace forrelab
