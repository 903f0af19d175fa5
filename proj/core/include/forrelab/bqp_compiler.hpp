#ifndef FORRELAB_BQP_COMPILER_HPP
#define FORRELAB_BQP_COMPILER_HPP

#include <array>
#include <string>
#include <vector>

namespace forrelab {

// One circuit layer: a set of Hadamard wires plus commuting diagonal gates.
// The Hadamard set must be disjoint from the diagonal supports within the
// layer; diagonal gates may overlap each other (they commute).
struct circuit_layer {
  std::vector<int> hadamards;                // sorted, distinct
  std::vector<std::array<int, 2>> csigns;    // CZ pairs, each sorted
  std::vector<std::array<int, 3>> ccsigns;   // CCZ triples, each sorted
};

// Circuits are built from {H, CZ, CCZ}.  Wire w corresponds to bit w of the
// basis-state index (least significant bit = wire 0).
struct circuit {
  int n_qubits = 0;
  std::vector<circuit_layer> layers;
};

// A +-1 valued function f(z) = (-1)^{sum of monomials}, each monomial the
// product of at most three bits of z.  An empty monomial list is the constant
// +1 function; an empty monomial (no variables) contributes a fixed sign flip.
struct phase_poly_function {
  int n_bits = 0;
  std::vector<std::vector<int>> monomials;  // each sorted; list sorted; mod-2 reduced

  bool is_constant_one() const { return monomials.empty(); }
};

struct compile_result {
  int n_bits = 0;                            // circuit wires plus dummy wire if engaged
  std::vector<phase_poly_function> functions;
  std::vector<int> qubit_relabeling;         // final wire holding each original wire's data
  int dummy_count = 0;                       // number of pairings that engaged the dummy wire
  double scale = 1.0;                        // 2^{-(dummy_count mod 2)/2}
};

// Text format, one layer per line with pipe-separated gate groups:
//   H 0 2 | CCZ 0 1 2 | CZ 1 3
// '#' starts a comment; blank lines are skipped; a lone 'I' marks an
// explicitly empty layer.  CCX (Toffoli) is accepted only as the sole group
// on its line and expands to H(target) / CCZ / H(target).  The wire count is
// inferred as one past the largest index.
circuit parse_circuit(const std::string& text);
std::string format_circuit(const circuit& c);
void validate_circuit(const circuit& c);

// Multiplies phase polynomials (concatenates monomials and cancels mod 2).
phase_poly_function multiply(const phase_poly_function& f,
                             const phase_poly_function& g);

// The three identical CZ phase functions whose sandwich with four full
// Hadamard layers equals SWAP(a,b) * H_a H_b, identity on bystanders.
std::array<phase_poly_function, 3> hadamard_gadget(int n_bits, int a, int b);

// Gate-by-gate compilation: every diagonal gate gets its own function slot,
// every Hadamard set becomes one gadget (three slots), and constant functions
// pad the in-between parities.  The product H f_k H ... f_1 H then equals a
// wire permutation times the circuit (times H^dummy_count on the dummy wire),
// so phi(functions) = scale * <0|circuit|0>.
compile_result compile_gatewise(const circuit& c);

// Layer-packed compilation: each layer contributes three slots (pairing CZs,
// pairing CZs times the layer's diagonals, pairing CZs) and adjacent layer
// boundaries merge, giving at most 2*depth + 1 functions.  Interior constant
// functions are eliminated by merging their neighbours pointwise.
compile_result compile_layers(const circuit& c);

// Truth table of f over all 2^n_bits inputs (guarded at 20 bits).
std::vector<double> materialize_phase_function(const phase_poly_function& f);

// Dense statevector amplitude <0...0|circuit|0...0> (guarded at 16 wires).
double circuit_amplitude(const circuit& c);

// Materializes the compiled functions, evaluates phi, simulates the circuit
// amplitude, and returns |phi - scale * amplitude|.  Guarded at 12 wires.
double verify_compilation(const circuit& c, const compile_result& r);

}  // namespace forrelab

#endif  // FORRELAB_BQP_COMPILER_HPP
