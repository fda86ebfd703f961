#pragma once

#include <limits>

#include "qpool/circuit.hpp"
#include "qpool/distribution.hpp"
#include "qpool/random.hpp"

namespace qpool {

/// Relaxation (t1) and dephasing (t2) timescales in units of the gate time.
/// Infinite values switch the corresponding channel off.
class NoiseModel {
 public:
  /// Requires t1 > 0, t2 > 0 and t2 <= 2 t1.
  NoiseModel(double t1, double t2);
  static NoiseModel noiseless() {
    return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  }

  double t1() const noexcept { return t1_; }
  double t2() const noexcept { return t2_; }

  /// Variance of the X and Y rotation angles accumulated over `duration`.
  double variance_xy(double duration) const noexcept { return duration / t1_; }
  /// Variance of the Z rotation angle: pure dephasing rate 1/t2 - 1/(2 t1).
  double variance_z(double duration) const noexcept { return 2.0 * duration * (1.0 / t2_ - 0.5 / t1_); }

 private:
  double t1_;
  double t2_;
};

struct NoiseAngles {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Draws (x, y, z) in that order, each as sigma * normal(). Always consumes
/// three normals, whatever the duration.
NoiseAngles draw_noise_angles(const NoiseModel& model, double duration, RandomStream& stream);

/// Rotation applying RX(x), then RY(y), then RZ(z).
GateMatrix noise_rotation(const NoiseAngles& angles);

/// Stochastic noise gate on `qubit`. `stream` must have state scope;
/// every rank of the group draws the same angles.
void apply_noise_gate(StatePartition& state, Communicator& group, unsigned qubit, double duration,
                      const NoiseModel& model, RandomStream& stream);

/// How schedule_noise places gates in time. `asap` starts a gate as soon as
/// all its qubits are free; `sequential` runs one gate at a time in circuit
/// order.
enum class Scheduling { asap, sequential };

/// Inserts noise gates around every gate of a schedule.
///
/// Cost layers occupy the whole register and existing noise gates take no
/// time. For a qubit with gates
/// spanning [s_1, e_1], ..., [s_k, e_k] and circuit wall time W, the noise
/// windows are [0, e_1] before gate 1, [s_j, e_{j+1}] between gates j and
/// j+1, and [s_k, W] after gate k, so each gate is preceded and followed by
/// noise covering its own duration. Idle qubits get one window [0, W].
Circuit schedule_noise(const Circuit& circuit, Scheduling policy = Scheduling::asap);

}  // namespace qpool
