#include "qpool/gates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qpool {

double GateMatrix::unitarity_error() const noexcept {
  // (U^dagger U)_{jk} = sum_i conj(U_ij) U_ik
  const Amplitude d00 = std::conj(u00) * u00 + std::conj(u10) * u10;
  const Amplitude d01 = std::conj(u00) * u01 + std::conj(u10) * u11;
  const Amplitude d11 = std::conj(u01) * u01 + std::conj(u11) * u11;
  return std::max({std::abs(d00 - 1.0), std::abs(d01), std::abs(d11 - 1.0)});
}

const GateMatrix& GateMatrix::validated(double tol) const {
  if (!is_unitary(tol)) {
    throw DomainError("gate matrix is not unitary (error " + std::to_string(unitarity_error()) + ")");
  }
  return *this;
}

GateMatrix GateMatrix::operator*(const GateMatrix& r) const noexcept {
  return {cmul(u00, r.u00) + cmul(u01, r.u10), cmul(u00, r.u01) + cmul(u01, r.u11),
          cmul(u10, r.u00) + cmul(u11, r.u10), cmul(u10, r.u01) + cmul(u11, r.u11)};
}

namespace gates {

GateMatrix identity() { return {}; }

GateMatrix hadamard() {
  const double s = 1.0 / std::numbers::sqrt2;
  return {{s, 0}, {s, 0}, {s, 0}, {-s, 0}};
}

GateMatrix pauli_x() { return {{0, 0}, {1, 0}, {1, 0}, {0, 0}}; }

GateMatrix pauli_y() { return {{0, 0}, {0, -1}, {0, 1}, {0, 0}}; }

GateMatrix pauli_z() { return {{1, 0}, {0, 0}, {0, 0}, {-1, 0}}; }

GateMatrix rotation_x(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  return {{c, 0}, {0, -s}, {0, -s}, {c, 0}};
}

GateMatrix rotation_y(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  return {{c, 0}, {-s, 0}, {s, 0}, {c, 0}};
}

GateMatrix rotation_z(double theta) {
  const double c = std::cos(theta / 2), s = std::sin(theta / 2);
  return {{c, -s}, {0, 0}, {0, 0}, {c, s}};
}

}  // namespace gates

}  // namespace qpool
