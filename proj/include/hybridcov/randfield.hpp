#pragma once

// Locations, covariance matrices and exact Gaussian random field
// simulation through a Cholesky factor.
//
// Random numbers come from Philox4x32-10. A stream is identified by
// (seed, stream id): the seed is the 64-bit key, the stream id fills the
// upper two counter words and the block index the lower two. Replicate r of
// a simulation uses stream r; sample_uniform_locations uses kLocationStream.
// Normal variates are obtained by inversion of one uniform each.

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "hybridcov/kernel_spec.hpp"

namespace hybridcov {

struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  /// Ten rounds of the Philox bijection.
  static Counter block(Counter counter, Key key);
};

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t stream);

  std::uint32_t next_u32();
  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform();
  double normal();

 private:
  Philox4x32::Key key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  int used_ = 4;
};

inline constexpr std::uint64_t kLocationStream = ~std::uint64_t{0};

struct Locations {
  Eigen::MatrixXd points;  // one row per location

  int dim() const { return static_cast<int>(points.cols()); }
  Eigen::Index size() const { return points.rows(); }
  /// Throws std::invalid_argument if empty or not finite.
  void validate() const;
};

struct FieldSample {
  Locations locations;
  Eigen::VectorXd values;

  void validate() const;
};

struct SimulationConfig {
  std::uint64_t seed = 0;
  int n_replicates = 1;
  /// Diagonal jitter tried in order, relative to phi(0).
  std::vector<double> jitter_ladder{0.0, 1e-10, 1e-8, 1e-6};

  void validate() const;
};

/// Cholesky failure after the whole ladder was tried.
class FactorizationError : public std::runtime_error {
 public:
  FactorizationError(const std::string& what, double last_jitter, double condition_estimate)
      : std::runtime_error(what), last_jitter_(last_jitter), condition_estimate_(condition_estimate) {}
  double last_jitter() const noexcept { return last_jitter_; }
  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double last_jitter_;
  double condition_estimate_;
};

struct CholeskyFactor {
  Eigen::LLT<Eigen::MatrixXd> llt;
  double jitter = 0.0;  // relative to the variance passed to factorize
};

Locations sample_uniform_locations(int n, const std::vector<double>& lo, const std::vector<double>& hi,
                                   std::uint64_t seed);

/// Pairwise Euclidean distances; exactly symmetric with a zero diagonal.
Eigen::MatrixXd distance_matrix(const Locations& loc);

/// Sigma_ij = phi(|s_i - s_j|). Only the lower triangle is evaluated and
/// mirrored, so the result is bitwise symmetric.
Eigen::MatrixXd covariance_matrix(const Kernel& kernel, const Locations& loc);
/// Same, from a precomputed distance matrix.
Eigen::MatrixXd covariance_from_distances(const Kernel& kernel, const Eigen::MatrixXd& distances);
/// C_ij = phi(|a_i - b_j|).
Eigen::MatrixXd cross_covariance(const Kernel& kernel, const Locations& a, const Locations& b);

/// Factorizes sigma + j * variance * I for the first j in the ladder that
/// succeeds. Throws FactorizationError otherwise.
CholeskyFactor factorize(const Eigen::MatrixXd& sigma, double variance,
                         const std::vector<double>& ladder = SimulationConfig{}.jitter_ladder);

struct SimulationResult {
  std::vector<FieldSample> replicates;
  double jitter_used = 0.0;  // relative to phi(0)
};

SimulationResult simulate(const Kernel& kernel, const Locations& loc, const SimulationConfig& config);

/// Header x1,...,xd,value; values printed with 17 significant digits.
void write_field_csv(std::ostream& out, const FieldSample& sample);
/// Throws std::runtime_error naming the offending line.
FieldSample read_field_csv(std::istream& in);

/// Shared CSV helpers: "%.17g" formatting and header-checked numeric rows.
std::string format_double(double x);
std::vector<std::vector<double>> read_numeric_csv(std::istream& in, std::vector<std::string>& header);

}  // namespace hybridcov
