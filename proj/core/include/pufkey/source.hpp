#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pufkey/transforms.hpp"

namespace pufkey {

// Gaussian RO-array source: each device owns one latent array drawn from
// N(mean, cov); each measurement of that device adds i.i.d. N(0, noise_var)
// per RO cell.
struct SourceModel {
  int rows = 0;
  int cols = 0;
  Eigen::VectorXd mean;  // length L = rows*cols, row-major cell order
  Eigen::MatrixXd cov;   // L x L symmetric PSD
  double noise_var = 0.0;

  int size() const { return rows * cols; }
  void validate() const;  // throws with the offending eigenvalue if not PSD

  // Separable exponential correlation: cov(a,b) = sigma_x2 * rho^{Manhattan
  // distance between cells a and b}, constant mean. The library default is
  // rho = 0.97 on a 16x16 array (strongly correlated neighbors).
  static SourceModel exponential(int rows, int cols, double mean_value,
                                 double sigma_x2, double rho, double noise_var);
};

struct DeviceRecord {
  std::int64_t id = 0;
  std::vector<Eigen::MatrixXd> measurements;  // each rows x cols

  Eigen::MatrixXd mean_array() const;
};

struct RODataset {
  int rows = 0;
  int cols = 0;
  std::vector<DeviceRecord> devices;
};

// Per-coefficient statistics in coeff_index order (vector slot i-1 holds
// coefficient index i). sigma_n is the noise deviation AFTER equalization,
// i.e. raw per-measurement noise deviation divided by sigma. Index 1 (DC) is
// always unusable; so is any coefficient with zero across-device variance.
struct CoefficientStats {
  int rows = 0;
  int cols = 0;
  std::vector<double> mu, sigma, sigma_n;
  std::vector<std::uint8_t> usable;

  int size() const { return int(mu.size()); }
  void validate() const;

  std::string to_json() const;
  static CoefficientStats from_json(const std::string& text);
};

// Deterministic in (model, seed): device d's latent and measurement noise are
// drawn from streams forked off the seed by device index.
RODataset synth_dataset(const SourceModel& model, int n_devices,
                        int n_measurements, std::uint64_t seed);

// mu/sigma: sample mean and unbiased (n-1) deviation of each coefficient over
// device-averaged transforms. Noise: zero-mean deviation of non-overlapping
// within-device measurement-pair differences scaled by 1/sqrt(2), then
// divided by sigma. Devices with fewer than two measurements contribute only
// to mu/sigma.
CoefficientStats estimate_stats(const RODataset& dataset, const Transform& kind);

// Unbiased sample autocovariance over per-device vectors; exactly symmetric.
Eigen::MatrixXd estimate_autocovariance(const std::vector<Eigen::VectorXd>& values);

// Dataset CSV: header "device,measurement,row,col,count", one row per RO cell.
RODataset ingest_csv(std::istream& in);
void emit_csv(const RODataset& dataset, std::ostream& out);

}  // namespace pufkey
