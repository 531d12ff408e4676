#pragma once

#include "qcoarse/matcore.hpp"

#include <cstdint>
#include <random>

namespace qcoarse {

/// Mixes a base seed with a stream index (splitmix64), so that trial `i` of a
/// run draws from the same stream regardless of scheduling.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(derive_seed(seed, stream)) {}

  double normal() { return normal_(engine_); }
  double uniform() { return uniform_(engine_); }
  /// Uniform on [lo, hi].
  std::size_t index(std::size_t lo, std::size_t hi);
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Complex Ginibre matrix with i.i.d. standard complex Gaussian entries.
Matrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// Haar unitary: QR of a Ginibre matrix with the phases of diag(R) moved
/// into Q, which makes the law exactly Haar and the output a deterministic
/// function of the draw.
Matrix haar_unitary(Eigen::Index n, Rng& rng);

/// Uniformly random unit vector in C^n.
Vector random_unit_vector(Eigen::Index n, Rng& rng);

/// Projection onto the span of the first k columns of a Haar unitary.
Projection random_projection(Eigen::Index n, Eigen::Index k, Rng& rng);

}  // namespace qcoarse
