#pragma once
#include <array>
#include <vector>

#include "spinframe/geometry.hpp"

namespace spinframe {

// Connection value plus its exact coordinate derivatives, from nested
// forward-mode duals through the closed forms.
struct ClosedConnection {
  ConnectionAtPoint value;
  std::array<ConnectionAtPoint, 4> derivative;
};

// Closed-form connection of a type-A field: H from 2 f^2 d(f^{mu n}/f),
// omega from the H/f pairing, all other blocks zero. Throws DomainError
// when |f| < 1e-10 (the 1/f forms degenerate) or when the normalization
// constraint is violated beyond 1e-8.
ConnectionAtPoint typeA_closed_connection(const TypeASpec& params, const Vec4& x);
ClosedConnection typeA_closed_connection_derivs(const TypeASpec& params, const Vec4& x);
ConnectionField typeA_connection_source(const TypeASpec& params);

// Type-B counterpart: omega vanishes identically, A comes from the H/f
// pairing on the normal block.
ConnectionAtPoint typeB_closed_connection(const TypeBSpec& params, const Vec4& x);
ClosedConnection typeB_closed_connection_derivs(const TypeBSpec& params, const Vec4& x);
ConnectionField typeB_connection_source(const TypeBSpec& params);

// psi K psi~ for psi of grades {0,2} and K of grade 2. Checks the grade
// contracts and that the result is grade 2 within 1e-12.
Multivector conjugate_bivector(const Multivector& psi, const Multivector& K);

// Connection of a product field psi1 * psi2, from psi1's parameters and
// the second factor's connection. `formula` is the literal closed-form
// transcription, `oracle` the direct Clifford conjugation
// split(K1 + psi1 K2 psi1~). `primed` is the returned connection: the
// formula value normally, the oracle value (with `oracle_override` set)
// if the two disagree beyond 1e-8.
struct ComposedConnection {
  ConnectionAtPoint primed;
  ConnectionAtPoint formula;
  ConnectionAtPoint oracle;
  ConnectionAtPoint conn1;  // psi1's own connection at x
  ConnectionAtPoint conn2;  // input echo
  double f = 0.0;
  std::vector<double> f_mixed;
  double formula_deviation = 0.0;
  bool oracle_override = false;
};

ComposedConnection compose_connection_A(const TypeASpec& psi1, const Vec4& x,
                                        const ConnectionAtPoint& conn2);
ComposedConnection compose_connection_B(const TypeBSpec& psi1, const Vec4& x,
                                        const ConnectionAtPoint& conn2);

}  // namespace spinframe
