#include "forrelab/blockpoly.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <random>
#include <unordered_map>

#include "forrelab/errors.hpp"
#include "forrelab/hadamard.hpp"

namespace forrelab {

namespace {

std::size_t block_count_checked(const block_poly& p) {
  if (p.k <= 0) throw shape_error("block polynomial must have at least one block");
  if (static_cast<int>(p.block_sizes.size()) != p.k)
    throw shape_error("block_sizes length must equal the block count");
  return static_cast<std::size_t>(p.k);
}

// Sorted list of block ids from a subset argument, validated against p.
std::vector<int> checked_subset(const block_poly& p, const std::vector<int>& S) {
  if (S.empty()) throw value_error("block subset must be nonempty");
  std::vector<int> blocks = S;
  std::sort(blocks.begin(), blocks.end());
  if (std::adjacent_find(blocks.begin(), blocks.end()) != blocks.end())
    throw value_error("block subset contains a repeated block id");
  if (blocks.front() < 0 || blocks.back() >= p.k)
    throw value_error("block subset id out of range");
  return blocks;
}

int index_bits(int size) {
  if (size <= 1) return 1;
  return std::bit_width(static_cast<unsigned>(size - 1));
}

// Marginal coefficient sums of p grouped by the variables of the blocks in
// S (sorted): for each S-side index tuple, the sum of coefficients over all
// terms sharing that projection.
std::vector<std::pair<std::vector<int>, double>> marginal_sums(const block_poly& p,
                                                               const std::vector<int>& blocks) {
  const std::size_t k = static_cast<std::size_t>(p.k);
  int total_bits = 0;
  for (int j : blocks) total_bits += index_bits(p.block_sizes[static_cast<std::size_t>(j)]);

  std::vector<std::pair<std::vector<int>, double>> out;
  if (total_bits <= 64) {
    std::unordered_map<std::uint64_t, double> acc;
    acc.reserve(p.term_count());
    for (std::size_t i = 0; i < p.term_count(); ++i) {
      const int* idx = p.term(i);
      std::uint64_t key = 0;
      for (int j : blocks) {
        key <<= index_bits(p.block_sizes[static_cast<std::size_t>(j)]);
        key |= static_cast<std::uint64_t>(idx[j]);
      }
      acc[key] += p.term_coefs[i];
    }
    out.reserve(acc.size());
    for (const auto& [key, sum] : acc) {
      std::vector<int> digits(blocks.size());
      std::uint64_t rest = key;
      for (std::size_t d = blocks.size(); d-- > 0;) {
        const int bits = index_bits(p.block_sizes[static_cast<std::size_t>(blocks[d])]);
        digits[d] = static_cast<int>(rest & ((1ULL << bits) - 1));
        rest >>= bits;
      }
      out.emplace_back(std::move(digits), sum);
    }
  } else {
    std::map<std::vector<int>, double> acc;
    std::vector<int> key(blocks.size());
    for (std::size_t i = 0; i < p.term_count(); ++i) {
      const int* idx = p.term(i);
      for (std::size_t d = 0; d < blocks.size(); ++d) key[d] = idx[blocks[d]];
      acc[key] += p.term_coefs[i];
    }
    out.reserve(acc.size());
    for (auto& [k2, sum] : acc) out.emplace_back(k2, sum);
  }
  (void)k;
  return out;
}

}  // namespace

void block_poly::add_term(const std::vector<int>& idx, double coef) {
  if (static_cast<int>(idx.size()) != k)
    throw shape_error("term index tuple length must equal the block count");
  term_vars.insert(term_vars.end(), idx.begin(), idx.end());
  term_coefs.push_back(coef);
}

void block_poly::canonicalize() {
  const std::size_t m = term_count();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t kk = static_cast<std::size_t>(k);
  auto key_less = [&](std::size_t a, std::size_t b) {
    return std::lexicographical_compare(term_vars.begin() + a * kk, term_vars.begin() + (a + 1) * kk,
                                        term_vars.begin() + b * kk, term_vars.begin() + (b + 1) * kk);
  };
  std::sort(order.begin(), order.end(), key_less);

  std::vector<int> vars;
  std::vector<double> coefs;
  vars.reserve(term_vars.size());
  coefs.reserve(m);
  for (std::size_t r = 0; r < m;) {
    std::size_t s = r + 1;
    double sum = term_coefs[order[r]];
    while (s < m && !key_less(order[r], order[s])) sum += term_coefs[order[s++]];
    if (sum != 0.0) {
      const int* t = term(order[r]);
      vars.insert(vars.end(), t, t + kk);
      coefs.push_back(sum);
    }
    r = s;
  }
  term_vars = std::move(vars);
  term_coefs = std::move(coefs);
}

void validate_blockpoly(const block_poly& p) {
  block_count_checked(p);
  for (int s : p.block_sizes)
    if (s <= 0) throw shape_error("every block must contain at least one variable");
  if (p.term_vars.size() != p.term_coefs.size() * static_cast<std::size_t>(p.k))
    throw shape_error("term index storage is inconsistent with the coefficient count");
  for (std::size_t i = 0; i < p.term_count(); ++i) {
    const int* idx = p.term(i);
    for (int j = 0; j < p.k; ++j)
      if (idx[j] < 0 || idx[j] >= p.block_sizes[static_cast<std::size_t>(j)])
        throw value_error("term variable index out of range for its block");
    if (!std::isfinite(p.term_coefs[i])) throw value_error("term coefficient must be finite");
  }
}

double evaluate(const block_poly& p, const std::vector<std::vector<double>>& assignment) {
  if (static_cast<int>(assignment.size()) != p.k)
    throw shape_error("assignment must provide one value vector per block");
  for (int j = 0; j < p.k; ++j)
    if (assignment[static_cast<std::size_t>(j)].size() !=
        static_cast<std::size_t>(p.block_sizes[static_cast<std::size_t>(j)]))
      throw shape_error("assignment length mismatch for a block");
  double total = 0.0;
  for (std::size_t i = 0; i < p.term_count(); ++i) {
    const int* idx = p.term(i);
    double prod = p.term_coefs[i];
    for (int j = 0; j < p.k; ++j) prod *= assignment[static_cast<std::size_t>(j)][static_cast<std::size_t>(idx[j])];
    total += prod;
  }
  return total;
}

double lambda_S(const block_poly& p, const std::vector<int>& S) {
  validate_blockpoly(p);
  const std::vector<int> blocks = checked_subset(p, S);
  double total = 0.0;
  for (const auto& [digits, sum] : marginal_sums(p, blocks)) total += sum * sum;
  return total;
}

block_poly split_variable(const block_poly& p, int block, int index, int m) {
  validate_blockpoly(p);
  if (block < 0 || block >= p.k) throw value_error("split block id out of range");
  if (index < 0 || index >= p.block_sizes[static_cast<std::size_t>(block)])
    throw value_error("split variable index out of range");
  if (m < 1) throw value_error("split multiplicity must be at least 1");

  block_poly q;
  q.k = p.k;
  q.block_sizes = p.block_sizes;
  const int base = q.block_sizes[static_cast<std::size_t>(block)];
  q.block_sizes[static_cast<std::size_t>(block)] += m - 1;

  std::vector<int> idx(static_cast<std::size_t>(p.k));
  for (std::size_t i = 0; i < p.term_count(); ++i) {
    const int* t = p.term(i);
    idx.assign(t, t + p.k);
    if (t[block] != index) {
      q.add_term(idx, p.term_coefs[i]);
      continue;
    }
    const double c = p.term_coefs[i] / static_cast<double>(m);
    q.add_term(idx, c);  // copy 1 stays in the original slot
    for (int r = 1; r < m; ++r) {
      idx[static_cast<std::size_t>(block)] = base + r - 1;
      q.add_term(idx, c);
    }
    idx[static_cast<std::size_t>(block)] = index;
  }
  return q;
}

namespace {

// Lambda_S of the virtually split polynomial: original marginal sums scaled
// by the copy counts of the S-side variables.
double lambda_factored(const block_poly& p, const std::vector<int>& blocks,
                       const std::vector<std::vector<double>>& factor) {
  double total = 0.0;
  for (const auto& [digits, sum] : marginal_sums(p, blocks)) {
    double denom = 1.0;
    for (std::size_t d = 0; d < blocks.size(); ++d)
      denom *= factor[static_cast<std::size_t>(blocks[d])][static_cast<std::size_t>(digits[d])];
    total += sum * sum / denom;
  }
  return total;
}

}  // namespace

balance_result balance(const block_poly& p, double delta, const balance_options& opt) {
  validate_blockpoly(p);
  if (!(delta > 0.0)) throw value_error("balance threshold must be positive");

  // Spot-check boundedness: a wildly escaping polynomial cannot be balanced
  // within the advertised variable budget.
  {
    std::mt19937_64 rng(opt.boundedness_seed);
    std::vector<std::vector<double>> assignment(static_cast<std::size_t>(p.k));
    for (int rep = 0; rep < opt.boundedness_samples; ++rep) {
      for (int j = 0; j < p.k; ++j) {
        auto& a = assignment[static_cast<std::size_t>(j)];
        a.resize(static_cast<std::size_t>(p.block_sizes[static_cast<std::size_t>(j)]));
        for (double& v : a) v = (rng() & 1ULL) ? 1.0 : -1.0;
      }
      if (std::abs(evaluate(p, assignment)) > 1.0 + 1e-6)
        throw precondition_error("polynomial escapes the unit range on a +-1 assignment");
    }
  }

  // factor[j][l] = number of copies the original variable (j, l) has been
  // split into so far.
  std::vector<std::vector<double>> factor(static_cast<std::size_t>(p.k));
  for (int j = 0; j < p.k; ++j)
    factor[static_cast<std::size_t>(j)].assign(
        static_cast<std::size_t>(p.block_sizes[static_cast<std::size_t>(j)]), 1.0);

  const double budget = 4.0 * (std::ldexp(1.0, p.k) / delta) + 64.0;
  double split_vars = 0.0;

  // The splitting rule drives every Lambda_S to at most delta in exact
  // arithmetic, but boundary cases land exactly on delta, so the trigger
  // tolerates a relative rounding slack (the estimator audit uses the same
  // slack).
  const double slack = delta * (1.0 + 1e-9);
  const int max_sweeps = 8;
  for (int sweep = 0;; ++sweep) {
    if (sweep == max_sweeps)
      throw diagnostic_error("balance failed to settle within the sweep limit");
    bool fired = false;
    bool changed = false;
    for (unsigned mask = 1; mask < (1u << p.k); ++mask) {
      std::vector<int> blocks;
      for (int j = 0; j < p.k; ++j)
        if (mask & (1u << j)) blocks.push_back(j);
      if (lambda_factored(p, blocks, factor) <= slack) continue;
      fired = true;

      const int pivot = blocks.front();
      std::vector<int> rest(blocks.begin() + 1, blocks.end());

      // Per-original-variable share of Lambda_S attributed to the pivot
      // block, on the current (virtually split) polynomial.
      std::vector<double> share(
          static_cast<std::size_t>(p.block_sizes[static_cast<std::size_t>(pivot)]), 0.0);
      for (const auto& [digits, sum] : marginal_sums(p, blocks)) {
        double denom = 1.0;
        for (std::size_t d = 1; d < blocks.size(); ++d)
          denom *= factor[static_cast<std::size_t>(blocks[d])][static_cast<std::size_t>(digits[d])];
        share[static_cast<std::size_t>(digits[0])] += sum * sum / denom;
      }

      auto& fpivot = factor[static_cast<std::size_t>(pivot)];
      for (std::size_t l = 0; l < share.size(); ++l) {
        if (share[l] <= 0.0) continue;
        // Each existing copy carries share/f^2; it splits into m+1 parts.
        const double per_copy = std::sqrt(share[l]) / fpivot[l];
        const double m = std::floor(per_copy / delta);
        if (m < 1.0) continue;
        split_vars += fpivot[l] * m;
        if (split_vars > budget)
          throw precondition_error("splitting budget exceeded; polynomial appears unbounded");
        fpivot[l] *= (m + 1.0);
        changed = true;
      }
    }
    if (!fired) break;
    if (!changed)
      throw diagnostic_error("balance stalled above the threshold without progress");
  }

  // Materialize the factored representation.
  balance_result out;
  out.trace.origin.resize(static_cast<std::size_t>(p.k));
  std::vector<std::vector<int>> offset(static_cast<std::size_t>(p.k));
  int common = 0;
  double projected_terms = 0.0;
  for (int j = 0; j < p.k; ++j) {
    const auto& f = factor[static_cast<std::size_t>(j)];
    auto& off = offset[static_cast<std::size_t>(j)];
    off.resize(f.size());
    int pos = 0;
    for (std::size_t l = 0; l < f.size(); ++l) {
      off[l] = pos;
      pos += static_cast<int>(f[l]);
    }
    out.trace.new_variable_count += pos - p.block_sizes[static_cast<std::size_t>(j)];
    common = std::max(common, pos);
  }
  projected_terms = 0.0;
  for (std::size_t i = 0; i < p.term_count(); ++i) {
    const int* idx = p.term(i);
    double prod = 1.0;
    for (int j = 0; j < p.k; ++j)
      prod *= factor[static_cast<std::size_t>(j)][static_cast<std::size_t>(idx[j])];
    projected_terms += prod;
  }
  if (projected_terms > static_cast<double>(opt.max_terms))
    throw resource_error("balanced polynomial would exceed the materialized term budget");

  block_poly q;
  q.k = p.k;
  q.block_sizes.assign(static_cast<std::size_t>(p.k), common);
  q.term_vars.reserve(static_cast<std::size_t>(projected_terms) * static_cast<std::size_t>(p.k));
  q.term_coefs.reserve(static_cast<std::size_t>(projected_terms));

  for (int j = 0; j < p.k; ++j) {
    auto& org = out.trace.origin[static_cast<std::size_t>(j)];
    org.assign(static_cast<std::size_t>(common), -1);
    const auto& f = factor[static_cast<std::size_t>(j)];
    const auto& off = offset[static_cast<std::size_t>(j)];
    for (std::size_t l = 0; l < f.size(); ++l)
      for (int c = 0; c < static_cast<int>(f[l]); ++c)
        org[static_cast<std::size_t>(off[l] + c)] = static_cast<int>(l);
  }

  std::vector<int> copies(static_cast<std::size_t>(p.k));
  std::vector<int> cursor(static_cast<std::size_t>(p.k));
  std::vector<int> idx(static_cast<std::size_t>(p.k));
  for (std::size_t i = 0; i < p.term_count(); ++i) {
    const int* t = p.term(i);
    double fprod = 1.0;
    for (int j = 0; j < p.k; ++j) {
      copies[static_cast<std::size_t>(j)] =
          static_cast<int>(factor[static_cast<std::size_t>(j)][static_cast<std::size_t>(t[j])]);
      fprod *= copies[static_cast<std::size_t>(j)];
      cursor[static_cast<std::size_t>(j)] = 0;
    }
    const double c = p.term_coefs[i] / fprod;
    // Odometer over the copy choices of every block.
    while (true) {
      for (int j = 0; j < p.k; ++j)
        idx[static_cast<std::size_t>(j)] =
            offset[static_cast<std::size_t>(j)][static_cast<std::size_t>(t[j])] +
            cursor[static_cast<std::size_t>(j)];
      q.add_term(idx, c);
      int j = p.k - 1;
      while (j >= 0 && ++cursor[static_cast<std::size_t>(j)] == copies[static_cast<std::size_t>(j)]) {
        cursor[static_cast<std::size_t>(j)] = 0;
        --j;
      }
      if (j < 0) break;
    }
  }
  out.poly = std::move(q);
  return out;
}

void validate_query_algorithm(const query_algorithm& a) {
  if (a.n < 1 || a.n > 20) throw shape_error("query algorithm register size out of range");
  if (a.t < 1) throw shape_error("query algorithm must make at least one query");
  if (a.input_length < 1) throw shape_error("query algorithm input length must be positive");
  const std::size_t N = std::size_t{1} << a.n;
  if (a.unitaries.size() != static_cast<std::size_t>(a.t) + 1)
    throw shape_error("query algorithm needs exactly t+1 unitaries");
  for (const auto& U : a.unitaries) {
    if (U.rows() != static_cast<Eigen::Index>(N) || U.cols() != static_cast<Eigen::Index>(N))
      throw shape_error("unitary dimension mismatch with the register size");
    const Eigen::MatrixXd G = U * U.transpose();
    if ((G - Eigen::MatrixXd::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff() > 1e-9)
      throw value_error("query algorithm matrix is not orthogonal");
  }
  if (a.query_index_map.size() != N)
    throw shape_error("query index map must cover every basis state");
  for (int v : a.query_index_map)
    if (v < -1 || v >= a.input_length) throw value_error("query index map entry out of range");
  std::vector<char> seen(N, 0);
  for (int s : a.accepting_states) {
    if (s < 0 || s >= static_cast<int>(N)) throw value_error("accepting state out of range");
    if (seen[static_cast<std::size_t>(s)]++) throw value_error("accepting state listed twice");
  }
}

double acceptance_probability(const query_algorithm& a, const std::vector<double>& X) {
  validate_query_algorithm(a);
  if (X.size() != static_cast<std::size_t>(a.input_length))
    throw shape_error("input length mismatch for the query algorithm");
  const std::size_t N = std::size_t{1} << a.n;
  Eigen::VectorXd v = a.unitaries[0].col(0);
  for (int q = 1; q <= a.t; ++q) {
    for (std::size_t s = 0; s < N; ++s) {
      const int pos = a.query_index_map[s];
      if (pos >= 0) v[static_cast<Eigen::Index>(s)] *= X[static_cast<std::size_t>(pos)];
    }
    v = a.unitaries[static_cast<std::size_t>(q)] * v;
  }
  double prob = 0.0;
  for (int s : a.accepting_states) prob += v[s] * v[s];
  return prob;
}

extraction_result from_query_algorithm(const query_algorithm& a) {
  validate_query_algorithm(a);
  const std::size_t N = std::size_t{1} << a.n;

  bool has_dummy = false;
  for (int v : a.query_index_map)
    if (v < 0) has_dummy = true;
  const int B = a.input_length + (has_dummy ? 1 : 0);

  // var_of[s]: block-variable index contributed by state s at each query.
  std::vector<int> var_of(N);
  for (std::size_t s = 0; s < N; ++s)
    var_of[s] = has_dummy ? a.query_index_map[s] + 1 : a.query_index_map[s];

  // Rows = states, columns = monomials over the query variables so far.
  Eigen::MatrixXd M = a.unitaries[0].col(0);
  std::size_t L = 1;
  for (int q = 1; q <= a.t; ++q) {
    const std::size_t L2 = L * static_cast<std::size_t>(B);
    if (static_cast<double>(L2) * static_cast<double>(N) > 1e7)
      throw resource_error("query polynomial extraction exceeds the propagation budget");
    Eigen::MatrixXd M2 = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N),
                                               static_cast<Eigen::Index>(L2));
    for (std::size_t s = 0; s < N; ++s)
      for (std::size_t T = 0; T < L; ++T)
        M2(static_cast<Eigen::Index>(s),
           static_cast<Eigen::Index>(T * static_cast<std::size_t>(B) +
                                     static_cast<std::size_t>(var_of[s]))) =
            M(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(T));
    M = a.unitaries[static_cast<std::size_t>(q)] * M2;
    L = L2;
  }

  if (static_cast<double>(L) * static_cast<double>(L) > 5e6)
    throw resource_error("query polynomial extraction exceeds the assembly budget");

  // Gram matrix over the accepting rows: entry (T1, T2) is the coefficient
  // of the monomial pair (first-copy T1, second-copy T2).
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(L),
                                            static_cast<Eigen::Index>(L));
  for (int s : a.accepting_states) G += M.row(s).transpose() * M.row(s);

  extraction_result out;
  out.poly.k = 2 * a.t;
  out.poly.block_sizes.assign(static_cast<std::size_t>(2 * a.t), B);
  std::vector<int> idx(static_cast<std::size_t>(2 * a.t));
  for (std::size_t T1 = 0; T1 < L; ++T1) {
    for (std::size_t T2 = 0; T2 < L; ++T2) {
      const double c = G(static_cast<Eigen::Index>(T1), static_cast<Eigen::Index>(T2));
      if (c == 0.0) continue;
      std::size_t r1 = T1, r2 = T2;
      for (int q = a.t; q-- > 0;) {
        idx[static_cast<std::size_t>(q)] = static_cast<int>(r1 % static_cast<std::size_t>(B));
        idx[static_cast<std::size_t>(a.t + q)] = static_cast<int>(r2 % static_cast<std::size_t>(B));
        r1 /= static_cast<std::size_t>(B);
        r2 /= static_cast<std::size_t>(B);
      }
      out.poly.add_term(idx, c);
    }
  }

  out.variable_position.resize(static_cast<std::size_t>(B));
  for (int l = 0; l < B; ++l)
    out.variable_position[static_cast<std::size_t>(l)] = has_dummy ? l - 1 : l;
  return out;
}

std::vector<std::vector<double>> repeated_assignment(const extraction_result& ex,
                                                     const std::vector<double>& X) {
  const std::size_t B = ex.variable_position.size();
  std::vector<double> block(B);
  for (std::size_t l = 0; l < B; ++l) {
    const int pos = ex.variable_position[l];
    if (pos < 0) {
      block[l] = 1.0;
    } else {
      if (static_cast<std::size_t>(pos) >= X.size())
        throw shape_error("input too short for the extracted polynomial");
      block[l] = X[static_cast<std::size_t>(pos)];
    }
  }
  return std::vector<std::vector<double>>(static_cast<std::size_t>(ex.poly.k), block);
}

}  // namespace forrelab
