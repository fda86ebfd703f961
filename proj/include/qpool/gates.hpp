#pragma once

#include <array>
#include <string>

#include "qpool/types.hpp"

namespace qpool {

/// Row-major 2x2 matrix acting on one qubit.
struct GateMatrix {
  Amplitude u00{1.0, 0.0};
  Amplitude u01{0.0, 0.0};
  Amplitude u10{0.0, 0.0};
  Amplitude u11{1.0, 0.0};

  /// Max elementwise deviation of U^dagger U from the identity.
  double unitarity_error() const noexcept;
  bool is_unitary(double tol = 1e-12) const noexcept { return unitarity_error() < tol; }

  /// Throws DomainError when not unitary within `tol`.
  const GateMatrix& validated(double tol = 1e-12) const;

  /// Matrix product: (*this) * rhs, i.e. rhs acts first.
  GateMatrix operator*(const GateMatrix& rhs) const noexcept;

  bool operator==(const GateMatrix&) const = default;

  /// Pair update (a0, a1) <- U (a0, a1).
  void apply(Amplitude& a0, Amplitude& a1) const noexcept {
    const Amplitude b0 = cmul(u00, a0) + cmul(u01, a1);
    const Amplitude b1 = cmul(u10, a0) + cmul(u11, a1);
    a0 = b0;
    a1 = b1;
  }
};

namespace gates {

GateMatrix identity();
GateMatrix hadamard();
GateMatrix pauli_x();
GateMatrix pauli_y();
GateMatrix pauli_z();
/// exp(-i theta X / 2)
GateMatrix rotation_x(double theta);
/// exp(-i theta Y / 2)
GateMatrix rotation_y(double theta);
/// exp(-i theta Z / 2)
GateMatrix rotation_z(double theta);

}  // namespace gates

}  // namespace qpool
