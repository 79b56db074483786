#include "hybridcov/randfield.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "hybridcov/specfun.hpp"

namespace hybridcov {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

Philox4x32::Counter Philox4x32::block(Counter c, Key k) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k[0] += kW0;
      k[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, c[0], hi0, lo0);
    mulhilo(kM1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
  return c;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

std::uint32_t RandomStream::next_u32() {
  if (used_ == 4) {
    const Philox4x32::Counter ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                                  static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
    buffer_ = Philox4x32::block(ctr, key_);
    ++block_;
    used_ = 0;
  }
  return buffer_[used_++];
}

double RandomStream::uniform() {
  const std::uint64_t a = next_u32() >> 5;
  const std::uint64_t b = next_u32() >> 6;
  return (static_cast<double>((a << 26) | b) + 0.5) * 0x1.0p-53;
}

double RandomStream::normal() { return specfun::normal_quantile(uniform()); }

void Locations::validate() const {
  if (points.rows() == 0 || points.cols() == 0) throw std::invalid_argument("Locations: empty point set");
  if (!points.allFinite()) throw std::invalid_argument("Locations: coordinates must be finite");
}

void FieldSample::validate() const {
  locations.validate();
  if (values.size() != locations.size()) throw std::invalid_argument("FieldSample: values and locations differ in length");
  if (!values.allFinite()) throw std::invalid_argument("FieldSample: values must be finite");
}

void SimulationConfig::validate() const {
  if (n_replicates < 1) throw std::invalid_argument("SimulationConfig: n_replicates must be positive");
  if (jitter_ladder.empty() || jitter_ladder.front() != 0.0) {
    throw std::invalid_argument("SimulationConfig: jitter ladder must start at 0");
  }
  for (std::size_t i = 1; i < jitter_ladder.size(); ++i) {
    if (!(jitter_ladder[i] > jitter_ladder[i - 1])) {
      throw std::invalid_argument("SimulationConfig: jitter ladder must be strictly increasing");
    }
  }
}

Locations sample_uniform_locations(int n, const std::vector<double>& lo, const std::vector<double>& hi,
                                   std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_uniform_locations: n must be positive");
  if (lo.size() != hi.size() || lo.empty()) {
    throw std::invalid_argument("sample_uniform_locations: lo and hi must have the same nonzero length");
  }
  for (std::size_t k = 0; k < lo.size(); ++k) {
    if (!(lo[k] < hi[k])) throw std::invalid_argument("sample_uniform_locations: need lo < hi in every coordinate");
  }
  RandomStream rng(seed, kLocationStream);
  Locations out;
  out.points.resize(n, static_cast<Eigen::Index>(lo.size()));
  for (int i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < lo.size(); ++k) {
      out.points(i, static_cast<Eigen::Index>(k)) = lo[k] + (hi[k] - lo[k]) * rng.uniform();
    }
  }
  return out;
}

Eigen::MatrixXd distance_matrix(const Locations& loc) {
  loc.validate();
  const Eigen::Index n = loc.size();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j + 1; i < n; ++i) {
      d(i, j) = d(j, i) = (loc.points.row(i) - loc.points.row(j)).norm();
    }
  }
  return d;
}

Eigen::MatrixXd covariance_from_distances(const Kernel& kernel, const Eigen::MatrixXd& distances) {
  const Eigen::Index n = distances.rows();
  Eigen::MatrixXd sigma(n, n);
  const double var = kernel.variance();
  for (Eigen::Index j = 0; j < n; ++j) {
    sigma(j, j) = var;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v = distances(i, j) == 0.0 ? var : kernel(distances(i, j));
      if (!std::isfinite(v)) throw std::domain_error("covariance_matrix: kernel value is not finite");
      sigma(i, j) = sigma(j, i) = v;
    }
  }
  return sigma;
}

Eigen::MatrixXd covariance_matrix(const Kernel& kernel, const Locations& loc) {
  if (loc.dim() != kernel.dim()) throw std::invalid_argument("covariance_matrix: kernel and locations differ in dimension");
  return covariance_from_distances(kernel, distance_matrix(loc));
}

Eigen::MatrixXd cross_covariance(const Kernel& kernel, const Locations& a, const Locations& b) {
  a.validate();
  b.validate();
  if (a.dim() != b.dim() || a.dim() != kernel.dim()) {
    throw std::invalid_argument("cross_covariance: dimension mismatch");
  }
  Eigen::MatrixXd c(a.size(), b.size());
  for (Eigen::Index j = 0; j < b.size(); ++j) {
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      const double h = (a.points.row(i) - b.points.row(j)).norm();
      c(i, j) = h == 0.0 ? kernel.variance() : kernel(h);
    }
  }
  if (!c.allFinite()) throw std::domain_error("cross_covariance: kernel value is not finite");
  return c;
}

CholeskyFactor factorize(const Eigen::MatrixXd& sigma, double variance, const std::vector<double>& ladder) {
  if (sigma.rows() != sigma.cols() || sigma.rows() == 0) throw std::invalid_argument("factorize: need a square matrix");
  if (!(variance > 0.0)) throw std::invalid_argument("factorize: variance must be positive");
  CholeskyFactor out;
  for (double j : ladder) {
    if (j == 0.0) {
      out.llt.compute(sigma);
    } else {
      Eigen::MatrixXd shifted = sigma;
      shifted.diagonal().array() += j * variance;
      out.llt.compute(shifted);
    }
    if (out.llt.info() == Eigen::Success) {
      out.jitter = j;
      return out;
    }
  }
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sigma, Eigen::EigenvaluesOnly).eigenvalues();
  const double cond = ev.cwiseAbs().maxCoeff() / std::max(std::fabs(ev.minCoeff()), std::numeric_limits<double>::min());
  std::ostringstream msg;
  msg << "Cholesky factorization failed up to jitter " << ladder.back() << " * phi(0); smallest eigenvalue "
      << ev.minCoeff() << ", condition estimate " << cond;
  throw FactorizationError(msg.str(), ladder.back(), cond);
}

SimulationResult simulate(const Kernel& kernel, const Locations& loc, const SimulationConfig& config) {
  config.validate();
  const Eigen::MatrixXd sigma = covariance_matrix(kernel, loc);
  const CholeskyFactor f = factorize(sigma, kernel.variance(), config.jitter_ladder);
  const Eigen::MatrixXd lower = f.llt.matrixL();

  SimulationResult out;
  out.jitter_used = f.jitter;
  out.replicates.reserve(static_cast<std::size_t>(config.n_replicates));
  const Eigen::Index n = loc.size();
  for (int r = 0; r < config.n_replicates; ++r) {
    RandomStream rng(config.seed, static_cast<std::uint64_t>(r));
    Eigen::VectorXd eps(n);
    for (Eigen::Index i = 0; i < n; ++i) eps(i) = rng.normal();
    FieldSample s;
    s.locations = loc;
    s.values = lower.triangularView<Eigen::Lower>() * eps;
    out.replicates.push_back(std::move(s));
  }
  return out;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_field_csv(std::ostream& out, const FieldSample& sample) {
  sample.validate();
  const int d = sample.locations.dim();
  for (int k = 0; k < d; ++k) out << 'x' << (k + 1) << ',';
  out << "value\n";
  for (Eigen::Index i = 0; i < sample.values.size(); ++i) {
    for (int k = 0; k < d; ++k) out << format_double(sample.locations.points(i, k)) << ',';
    out << format_double(sample.values(i)) << '\n';
  }
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto a = cell.find_first_not_of(" \t\r");
    const auto b = cell.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? "" : cell.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::vector<std::vector<double>> read_numeric_csv(std::istream& in, std::vector<std::string>& header) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("CSV: missing header line");
  header = split_line(line);
  std::vector<std::vector<double>> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size()) {
      throw std::runtime_error("CSV line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                               " fields, found " + std::to_string(cells.size()));
    }
    std::vector<double> row;
    for (const auto& c : cells) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != c.size() || c.empty()) {
        throw std::runtime_error("CSV line " + std::to_string(line_no) + ": '" + c + "' is not a number");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

FieldSample read_field_csv(std::istream& in) {
  std::vector<std::string> header;
  const auto rows = read_numeric_csv(in, header);
  if (header.size() < 2 || header.back() != "value") {
    throw std::runtime_error("field CSV: header must be x1,...,xd,value");
  }
  const int d = static_cast<int>(header.size()) - 1;
  for (int k = 0; k < d; ++k) {
    if (header[static_cast<std::size_t>(k)] != "x" + std::to_string(k + 1)) {
      throw std::runtime_error("field CSV: header must be x1,...,xd,value");
    }
  }
  if (rows.empty()) throw std::runtime_error("field CSV: no data rows");
  FieldSample s;
  s.locations.points.resize(static_cast<Eigen::Index>(rows.size()), d);
  s.values.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    for (int k = 0; k < d; ++k) s.locations.points(r, k) = rows[i][static_cast<std::size_t>(k)];
    s.values(r) = rows[i].back();
  }
  try {
    s.validate();
  } catch (const std::invalid_argument& e) {
    throw std::runtime_error(std::string("field CSV: ") + e.what());
  }
  return s;
}

}  // namespace hybridcov
