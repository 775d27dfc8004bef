#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace snkb {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Seed for stream `index` of a master seed. Streams are pure functions of
/// (master, index), so replication i draws the same numbers no matter how
/// work is scheduled across threads.
inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(splitmix64(master) ^ splitmix64(index * 0xD1342543DE82EF95ull + 0x2545F4914F6CDD1Dull));
}

/// mt19937_64 wrapper with portable sampling primitives. The std::*
/// distributions are implementation-defined, so output produced through
/// them would not be reproducible across standard libraries; everything
/// here is pinned to the raw 64-bit stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  static Rng stream(std::uint64_t master, std::uint64_t index) {
    return Rng(stream_seed(master, index));
  }

  std::uint64_t next() { return gen_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double u01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return u01() < p; }

  double rademacher() { return (gen_() & 1ull) ? 1.0 : -1.0; }

  /// Standard normal via Marsaglia's polar method.
  double gauss() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * u01() - 1.0;
      v = 2.0 * u01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    have_spare_ = true;
    return u * m;
  }

  /// Uniform direction on the unit sphere in R^d.
  Eigen::VectorXd sphere(int d) {
    Eigen::VectorXd v(d);
    double n2;
    do {
      for (int i = 0; i < d; ++i) v[i] = gauss();
      n2 = v.squaredNorm();
    } while (n2 == 0.0);
    return v / std::sqrt(n2);
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace snkb
