#include "forrelab/bqp_compiler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>

#include "forrelab/errors.hpp"
#include "forrelab/phi.hpp"

namespace forrelab {

namespace {

// Sorts each monomial, drops repeated variables (bits are idempotent), sorts
// the list, and cancels equal monomials in pairs (exponents live mod 2).
std::vector<std::vector<int>> reduced(std::vector<std::vector<int>> monomials) {
  for (auto& m : monomials) {
    std::sort(m.begin(), m.end());
    m.erase(std::unique(m.begin(), m.end()), m.end());
  }
  std::sort(monomials.begin(), monomials.end());
  std::vector<std::vector<int>> out;
  for (auto& m : monomials) {
    if (!out.empty() && out.back() == m) {
      out.pop_back();
    } else {
      out.push_back(std::move(m));
    }
  }
  return out;
}

phase_poly_function make_function(int n_bits,
                                  std::vector<std::vector<int>> monomials) {
  phase_poly_function f;
  f.n_bits = n_bits;
  f.monomials = reduced(std::move(monomials));
  return f;
}

std::string trimmed(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

int parse_wire(const std::string& token, int lineno) {
  if (token.empty() ||
      !std::all_of(token.begin(), token.end(),
                   [](unsigned char ch) { return std::isdigit(ch); })) {
    throw value_error("line " + std::to_string(lineno) +
                      ": wire index '" + token +
                      "' is not a non-negative integer");
  }
  const long v = std::stol(token);
  if (v > 63) {
    throw value_error("line " + std::to_string(lineno) + ": wire index " +
                      token + " exceeds the 64-wire limit");
  }
  return static_cast<int>(v);
}

// Maps every variable of every monomial through the current wire placement.
std::vector<std::vector<int>> translated(
    const std::vector<std::vector<int>>& monomials,
    const std::vector<int>& wire_of) {
  std::vector<std::vector<int>> out = monomials;
  for (auto& m : out) {
    for (auto& v : m) v = wire_of[static_cast<std::size_t>(v)];
  }
  return out;
}

// Ascending pairing of the translated hadamard set; an odd leftover pairs
// with the dummy wire's current position.  Returns the CZ monomials and
// applies the pairing swaps to wire_of.
std::vector<std::vector<int>> pair_and_swap(const std::vector<int>& hset,
                                            const circuit& c, bool has_dummy,
                                            std::vector<int>& wire_of,
                                            int& dummy_count) {
  std::vector<int> cur;
  cur.reserve(hset.size() + 1);
  for (int q : hset) cur.push_back(wire_of[static_cast<std::size_t>(q)]);
  std::sort(cur.begin(), cur.end());
  if (cur.size() % 2 == 1) {
    if (!has_dummy) throw value_error("odd hadamard set without a dummy wire");
    cur.push_back(wire_of[static_cast<std::size_t>(c.n_qubits)]);
    ++dummy_count;
  }
  std::vector<std::vector<int>> cz;
  for (std::size_t i = 0; i + 1 < cur.size(); i += 2) {
    cz.push_back({std::min(cur[i], cur[i + 1]), std::max(cur[i], cur[i + 1])});
  }
  for (const auto& pair : cz) {
    for (auto& p : wire_of) {
      if (p == pair[0]) {
        p = pair[1];
      } else if (p == pair[1]) {
        p = pair[0];
      }
    }
  }
  return cz;
}

bool any_odd_hadamard_set(const circuit& c) {
  for (const auto& layer : c.layers) {
    if (layer.hadamards.size() % 2 == 1) return true;
  }
  return false;
}

void finish(compile_result& out, const std::vector<int>& wire_of) {
  out.qubit_relabeling = wire_of;
  out.scale = (out.dummy_count % 2 != 0) ? std::sqrt(0.5) : 1.0;
}

}  // namespace

circuit parse_circuit(const std::string& text) {
  circuit c;
  int max_index = -1;
  std::istringstream lines(text);
  std::string raw;
  int lineno = 0;
  while (std::getline(lines, raw)) {
    ++lineno;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    const std::string line = trimmed(raw);
    if (line.empty()) continue;

    std::vector<std::vector<std::string>> groups;
    std::size_t start = 0;
    while (start <= line.size()) {
      const auto bar = line.find('|', start);
      const std::string piece = trimmed(
          line.substr(start, bar == std::string::npos ? bar : bar - start));
      if (piece.empty()) {
        throw value_error("line " + std::to_string(lineno) +
                          ": empty gate group");
      }
      std::istringstream tokens(piece);
      std::vector<std::string> group;
      std::string tok;
      while (tokens >> tok) group.push_back(tok);
      groups.push_back(std::move(group));
      if (bar == std::string::npos) break;
      start = bar + 1;
    }

    auto wires = [&](const std::vector<std::string>& g, std::size_t want) {
      if (g.size() != want + 1) {
        throw value_error("line " + std::to_string(lineno) + ": gate '" +
                          g[0] + "' expects " + std::to_string(want) +
                          " wire indices");
      }
      std::vector<int> idx;
      for (std::size_t i = 1; i < g.size(); ++i) {
        idx.push_back(parse_wire(g[i], lineno));
      }
      std::sort(idx.begin(), idx.end());
      if (std::adjacent_find(idx.begin(), idx.end()) != idx.end()) {
        throw value_error("line " + std::to_string(lineno) + ": gate '" +
                          g[0] + "' repeats a wire index");
      }
      for (int v : idx) max_index = std::max(max_index, v);
      return idx;
    };

    if (groups.size() == 1 && groups[0][0] == "CCX") {
      const auto& g = groups[0];
      if (g.size() != 4) {
        throw value_error("line " + std::to_string(lineno) +
                          ": gate 'CCX' expects 3 wire indices");
      }
      const int target = parse_wire(g[3], lineno);
      auto idx = wires(g, 3);
      circuit_layer pre, mid, post;
      pre.hadamards = {target};
      mid.ccsigns.push_back({idx[0], idx[1], idx[2]});
      post.hadamards = {target};
      c.layers.push_back(pre);
      c.layers.push_back(mid);
      c.layers.push_back(post);
      continue;
    }

    circuit_layer layer;
    bool explicit_identity = false;
    for (const auto& g : groups) {
      const std::string& name = g[0];
      if (name == "I") {
        if (g.size() != 1 || groups.size() != 1) {
          throw value_error("line " + std::to_string(lineno) +
                            ": 'I' must stand alone");
        }
        explicit_identity = true;
      } else if (name == "H") {
        if (g.size() < 2) {
          throw value_error("line " + std::to_string(lineno) +
                            ": 'H' expects at least one wire index");
        }
        std::vector<int> idx;
        for (std::size_t i = 1; i < g.size(); ++i) {
          idx.push_back(parse_wire(g[i], lineno));
        }
        for (int v : idx) max_index = std::max(max_index, v);
        layer.hadamards.insert(layer.hadamards.end(), idx.begin(), idx.end());
      } else if (name == "CZ") {
        auto idx = wires(g, 2);
        layer.csigns.push_back({idx[0], idx[1]});
      } else if (name == "CCZ") {
        auto idx = wires(g, 3);
        layer.ccsigns.push_back({idx[0], idx[1], idx[2]});
      } else if (name == "CCX") {
        throw value_error("line " + std::to_string(lineno) +
                          ": 'CCX' must be the only group on its line");
      } else {
        throw value_error("line " + std::to_string(lineno) +
                          ": unknown gate '" + name + "'");
      }
    }
    std::sort(layer.hadamards.begin(), layer.hadamards.end());
    if (std::adjacent_find(layer.hadamards.begin(), layer.hadamards.end()) !=
        layer.hadamards.end()) {
      throw value_error("line " + std::to_string(lineno) +
                        ": repeated wire in the hadamard set");
    }
    (void)explicit_identity;
    c.layers.push_back(std::move(layer));
  }
  c.n_qubits = std::max(max_index + 1, 1);
  validate_circuit(c);
  return c;
}

std::string format_circuit(const circuit& c) {
  validate_circuit(c);
  std::ostringstream out;
  for (const auto& layer : c.layers) {
    std::vector<std::string> groups;
    if (!layer.hadamards.empty()) {
      std::string g = "H";
      for (int q : layer.hadamards) g += " " + std::to_string(q);
      groups.push_back(g);
    }
    for (const auto& cz : layer.csigns) {
      groups.push_back("CZ " + std::to_string(cz[0]) + " " +
                       std::to_string(cz[1]));
    }
    for (const auto& ccz : layer.ccsigns) {
      groups.push_back("CCZ " + std::to_string(ccz[0]) + " " +
                       std::to_string(ccz[1]) + " " + std::to_string(ccz[2]));
    }
    if (groups.empty()) groups.push_back("I");
    for (std::size_t i = 0; i < groups.size(); ++i) {
      out << (i ? " | " : "") << groups[i];
    }
    out << '\n';
  }
  return out.str();
}

void validate_circuit(const circuit& c) {
  if (c.n_qubits < 1 || c.n_qubits > 64) {
    throw shape_error("circuit needs between 1 and 64 wires");
  }
  auto check_range = [&](int q) {
    if (q < 0 || q >= c.n_qubits) {
      throw value_error("wire index " + std::to_string(q) +
                        " outside the " + std::to_string(c.n_qubits) +
                        "-wire circuit");
    }
  };
  for (const auto& layer : c.layers) {
    std::vector<int> diag_support;
    for (const auto& cz : layer.csigns) {
      if (cz[0] == cz[1]) throw value_error("CZ needs two distinct wires");
      for (int q : cz) {
        check_range(q);
        diag_support.push_back(q);
      }
    }
    for (const auto& ccz : layer.ccsigns) {
      if (ccz[0] == ccz[1] || ccz[0] == ccz[2] || ccz[1] == ccz[2]) {
        throw value_error("CCZ needs three distinct wires");
      }
      for (int q : ccz) {
        check_range(q);
        diag_support.push_back(q);
      }
    }
    if (!std::is_sorted(layer.hadamards.begin(), layer.hadamards.end()) ||
        std::adjacent_find(layer.hadamards.begin(), layer.hadamards.end()) !=
            layer.hadamards.end()) {
      throw value_error("hadamard set must be sorted and distinct");
    }
    std::sort(diag_support.begin(), diag_support.end());
    for (int q : layer.hadamards) {
      check_range(q);
      if (std::binary_search(diag_support.begin(), diag_support.end(), q)) {
        throw value_error(
            "hadamard set overlaps a diagonal gate in the same layer");
      }
    }
  }
}

phase_poly_function multiply(const phase_poly_function& f,
                             const phase_poly_function& g) {
  if (f.n_bits != g.n_bits) {
    throw shape_error("phase polynomial widths disagree");
  }
  std::vector<std::vector<int>> monomials = f.monomials;
  monomials.insert(monomials.end(), g.monomials.begin(), g.monomials.end());
  return make_function(f.n_bits, std::move(monomials));
}

std::array<phase_poly_function, 3> hadamard_gadget(int n_bits, int a, int b) {
  if (a == b) throw value_error("gadget needs two distinct wires");
  if (a < 0 || b < 0 || a >= n_bits || b >= n_bits) {
    throw value_error("gadget wires outside the register");
  }
  const phase_poly_function cz =
      make_function(n_bits, {{std::min(a, b), std::max(a, b)}});
  return {cz, cz, cz};
}

compile_result compile_gatewise(const circuit& c) {
  validate_circuit(c);
  const bool has_dummy = any_odd_hadamard_set(c);
  compile_result out;
  out.n_bits = c.n_qubits + (has_dummy ? 1 : 0);
  std::vector<int> wire_of(static_cast<std::size_t>(out.n_bits));
  std::iota(wire_of.begin(), wire_of.end(), 0);

  // pending tracks the parity of hadamard layers not yet matched by an
  // emitted function: diagonals need an odd prefix (the layers around them
  // must cancel), gadgets need an even one, and the closing layer needs odd.
  int pending = 0;
  auto push_constant = [&] {
    out.functions.push_back(make_function(out.n_bits, {}));
    pending ^= 1;
  };
  auto emit_diagonal = [&](std::vector<int> vars) {
    if (pending == 0) push_constant();
    for (auto& v : vars) v = wire_of[static_cast<std::size_t>(v)];
    out.functions.push_back(make_function(out.n_bits, {vars}));
    pending = 0;
  };
  auto emit_hadamard_set = [&](const std::vector<int>& hset) {
    if (hset.empty()) return;
    if (pending == 1) push_constant();
    const auto cz =
        pair_and_swap(hset, c, has_dummy, wire_of, out.dummy_count);
    for (int slot = 0; slot < 3; ++slot) {
      out.functions.push_back(make_function(out.n_bits, cz));
    }
    pending = 1;
  };

  for (const auto& layer : c.layers) {
    for (const auto& cz : layer.csigns) emit_diagonal({cz[0], cz[1]});
    for (const auto& ccz : layer.ccsigns) {
      emit_diagonal({ccz[0], ccz[1], ccz[2]});
    }
    emit_hadamard_set(layer.hadamards);
  }
  if (pending == 0) push_constant();
  finish(out, wire_of);
  return out;
}

compile_result compile_layers(const circuit& c) {
  validate_circuit(c);
  const bool has_dummy = any_odd_hadamard_set(c);
  compile_result out;
  out.n_bits = c.n_qubits + (has_dummy ? 1 : 0);
  std::vector<int> wire_of(static_cast<std::size_t>(out.n_bits));
  std::iota(wire_of.begin(), wire_of.end(), 0);

  auto& fs = out.functions;
  for (const auto& layer : c.layers) {
    std::vector<std::vector<int>> diag;
    for (const auto& cz : layer.csigns) diag.push_back({cz[0], cz[1]});
    for (const auto& ccz : layer.ccsigns) {
      diag.push_back({ccz[0], ccz[1], ccz[2]});
    }
    diag = translated(diag, wire_of);
    const auto cz = pair_and_swap(layer.hadamards, c, has_dummy, wire_of,
                                  out.dummy_count);
    const phase_poly_function outer = make_function(out.n_bits, cz);
    std::vector<std::vector<int>> middle = cz;
    middle.insert(middle.end(), diag.begin(), diag.end());
    // Each layer contributes [outer, outer*diagonals, outer]; the shared
    // hadamard layer between consecutive layers cancels, merging boundaries.
    if (fs.empty()) {
      fs.push_back(outer);
    } else {
      fs.back() = multiply(fs.back(), outer);
    }
    fs.push_back(make_function(out.n_bits, std::move(middle)));
    fs.push_back(outer);
  }
  if (fs.empty()) fs.push_back(make_function(out.n_bits, {}));

  // An interior constant sits between two hadamard layers that cancel, so
  // its neighbours merge into their pointwise product.
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t j = 1; j + 1 < fs.size(); ++j) {
      if (fs[j].is_constant_one()) {
        phase_poly_function merged = multiply(fs[j - 1], fs[j + 1]);
        fs.erase(fs.begin() + static_cast<std::ptrdiff_t>(j - 1),
                 fs.begin() + static_cast<std::ptrdiff_t>(j + 2));
        fs.insert(fs.begin() + static_cast<std::ptrdiff_t>(j - 1),
                  std::move(merged));
        changed = true;
        break;
      }
    }
  }
  finish(out, wire_of);
  return out;
}

std::vector<double> materialize_phase_function(const phase_poly_function& f) {
  if (f.n_bits < 1 || f.n_bits > 20) {
    throw resource_error("phase function truth table limited to 20 bits");
  }
  std::vector<std::uint32_t> masks;
  masks.reserve(f.monomials.size());
  for (const auto& m : f.monomials) {
    if (m.size() > 3) {
      throw value_error("phase polynomial monomials are limited to degree 3");
    }
    std::uint32_t mask = 0;
    for (int v : m) {
      if (v < 0 || v >= f.n_bits) {
        throw value_error("monomial variable outside the register");
      }
      mask |= std::uint32_t{1} << v;
    }
    masks.push_back(mask);
  }
  const std::size_t N = std::size_t{1} << f.n_bits;
  std::vector<double> table(N);
  for (std::size_t x = 0; x < N; ++x) {
    int parity = 0;
    for (std::uint32_t mask : masks) {
      parity ^= static_cast<int>((x & mask) == mask);
    }
    table[x] = parity ? -1.0 : 1.0;
  }
  return table;
}

double circuit_amplitude(const circuit& c) {
  validate_circuit(c);
  if (c.n_qubits > 16) {
    throw resource_error("statevector simulation limited to 16 wires");
  }
  const std::size_t N = std::size_t{1} << c.n_qubits;
  std::vector<double> v(N, 0.0);
  v[0] = 1.0;
  const double inv = std::sqrt(0.5);
  for (const auto& layer : c.layers) {
    auto flip = [&](std::size_t mask) {
      for (std::size_t x = 0; x < N; ++x) {
        if ((x & mask) == mask) v[x] = -v[x];
      }
    };
    for (const auto& cz : layer.csigns) {
      flip((std::size_t{1} << cz[0]) | (std::size_t{1} << cz[1]));
    }
    for (const auto& ccz : layer.ccsigns) {
      flip((std::size_t{1} << ccz[0]) | (std::size_t{1} << ccz[1]) |
           (std::size_t{1} << ccz[2]));
    }
    for (int w : layer.hadamards) {
      const std::size_t bit = std::size_t{1} << w;
      for (std::size_t x = 0; x < N; ++x) {
        if (x & bit) continue;
        const double a = v[x];
        const double b = v[x | bit];
        v[x] = (a + b) * inv;
        v[x | bit] = (a - b) * inv;
      }
    }
  }
  return v[0];
}

double verify_compilation(const circuit& c, const compile_result& r) {
  if (r.n_bits > 12) {
    throw resource_error("compiled verification limited to 12 wires");
  }
  if (r.functions.empty()) {
    throw value_error("compile result holds no functions");
  }
  if (r.n_bits < c.n_qubits) {
    throw shape_error("compile result narrower than the circuit");
  }
  instance_tuple t;
  t.n = r.n_bits;
  for (const auto& f : r.functions) {
    if (f.n_bits != r.n_bits) {
      throw shape_error("function width disagrees with the compile result");
    }
    t.functions.push_back(materialize_phase_function(f));
  }
  const double amplitude = circuit_amplitude(c);
  return std::abs(phi(t).phi - r.scale * amplitude);
}

}  // namespace forrelab
