#include "pufkey/source.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "pufkey/rng.hpp"

namespace pufkey {

using nlohmann::json;

void SourceModel::validate() const {
  if (rows <= 0 || cols <= 0) throw std::invalid_argument("model: non-positive dimensions");
  const int L = size();
  if (mean.size() != L || cov.rows() != L || cov.cols() != L)
    throw std::invalid_argument("model: mean/cov dimensions do not match rows*cols");
  if (noise_var < 0.0) throw std::invalid_argument("model: negative noise variance");
  for (int i = 0; i < L; ++i)
    for (int j = i + 1; j < L; ++j)
      if (std::fabs(cov(i, j) - cov(j, i)) > 1e-9 * std::max(1.0, std::fabs(cov(i, j))))
        throw std::invalid_argument("model: covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const double lmin = es.eigenvalues().minCoeff();
  const double lmax = std::max(es.eigenvalues().maxCoeff(), 0.0);
  if (lmin < -1e-9 * std::max(lmax, 1.0)) {
    std::ostringstream msg;
    msg << "model: covariance not positive semidefinite (eigenvalue " << lmin << ")";
    throw std::invalid_argument(msg.str());
  }
}

SourceModel SourceModel::exponential(int rows, int cols, double mean_value,
                                     double sigma_x2, double rho, double noise_var) {
  if (rho < 0.0 || rho >= 1.0)
    throw std::invalid_argument("model: correlation must be in [0,1)");
  if (sigma_x2 < 0.0) throw std::invalid_argument("model: negative sigma_x2");
  SourceModel m;
  m.rows = rows;
  m.cols = cols;
  const int L = rows * cols;
  m.mean = Eigen::VectorXd::Constant(L, mean_value);
  m.cov.resize(L, L);
  for (int a = 0; a < L; ++a) {
    const int ar = a / cols, ac = a % cols;
    for (int b = 0; b < L; ++b) {
      const int br = b / cols, bc = b % cols;
      m.cov(a, b) = sigma_x2 * std::pow(rho, std::abs(ar - br) + std::abs(ac - bc));
    }
  }
  m.noise_var = noise_var;
  return m;
}

Eigen::MatrixXd DeviceRecord::mean_array() const {
  if (measurements.empty()) throw std::logic_error("device has no measurements");
  Eigen::MatrixXd m = measurements[0];
  for (std::size_t i = 1; i < measurements.size(); ++i) m += measurements[i];
  return m / double(measurements.size());
}

void CoefficientStats::validate() const {
  const std::size_t L = mu.size();
  if (sigma.size() != L || sigma_n.size() != L || usable.size() != L ||
      std::size_t(rows) * cols != L)
    throw std::invalid_argument("stats: inconsistent field sizes");
  if (L > 0 && usable[0])
    throw std::invalid_argument("stats: DC coefficient (index 1) must be unusable");
  for (std::size_t i = 0; i < L; ++i) {
    if (usable[i] && !(sigma[i] > 0.0))
      throw std::invalid_argument("stats: usable coefficient with non-positive sigma");
    if (sigma_n[i] < 0.0)
      throw std::invalid_argument("stats: negative noise deviation");
  }
}

RODataset synth_dataset(const SourceModel& model, int n_devices,
                        int n_measurements, std::uint64_t seed) {
  if (n_devices <= 0 || n_measurements <= 0)
    throw std::invalid_argument("synth_dataset: need positive device/measurement counts");
  model.validate();
  const int L = model.size();

  // PSD square root via eigendecomposition; tolerates the tiny negative
  // eigenvalues that estimated covariances carry.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.cov);
  Eigen::VectorXd lambda = es.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd root =
      es.eigenvectors() * lambda.cwiseSqrt().asDiagonal() * es.eigenvectors().transpose();
  const double sigma_z = std::sqrt(model.noise_var);

  CounterRng master(seed);
  RODataset ds;
  ds.rows = model.rows;
  ds.cols = model.cols;
  ds.devices.resize(n_devices);
  for (int d = 0; d < n_devices; ++d) {
    CounterRng dev_rng = master.fork(d);
    Eigen::VectorXd g(L);
    for (int i = 0; i < L; ++i) g(i) = dev_rng.next_gaussian();
    const Eigen::VectorXd latent = model.mean + root * g;

    DeviceRecord& rec = ds.devices[d];
    rec.id = d;
    rec.measurements.reserve(n_measurements);
    for (int m = 0; m < n_measurements; ++m) {
      CounterRng meas_rng = dev_rng.fork(0x4D454153ull + m);  // per-measurement stream
      Eigen::MatrixXd a(model.rows, model.cols);
      for (int r = 0; r < model.rows; ++r)
        for (int c = 0; c < model.cols; ++c) {
          const double z = sigma_z == 0.0 ? 0.0 : sigma_z * meas_rng.next_gaussian();
          a(r, c) = latent(r * model.cols + c) + z;
        }
      rec.measurements.push_back(std::move(a));
    }
  }
  return ds;
}

CoefficientStats estimate_stats(const RODataset& dataset, const Transform& kind) {
  if (dataset.devices.size() < 2)
    throw std::invalid_argument("estimate_stats: need at least 2 devices");
  const int L = dataset.rows * dataset.cols;
  const int n_dev = int(dataset.devices.size());

  // Transform of the per-device measurement mean -> identifier statistics.
  std::vector<Eigen::MatrixXd> dev_coeffs;
  dev_coeffs.reserve(n_dev);
  for (const auto& dev : dataset.devices)
    dev_coeffs.push_back(kind.forward(dev.mean_array()));

  CoefficientStats st;
  st.rows = dataset.rows;
  st.cols = dataset.cols;
  st.mu.assign(L, 0.0);
  st.sigma.assign(L, 0.0);
  st.sigma_n.assign(L, 0.0);
  st.usable.assign(L, 0);

  for (int idx = 0; idx < L; ++idx) {
    const int r = idx / dataset.cols, c = idx % dataset.cols;
    double sum = 0.0;
    for (const auto& t : dev_coeffs) sum += t(r, c);
    const double mu = sum / n_dev;
    double ss = 0.0;
    for (const auto& t : dev_coeffs) ss += (t(r, c) - mu) * (t(r, c) - mu);
    st.mu[idx] = mu;
    st.sigma[idx] = std::sqrt(ss / (n_dev - 1));
  }

  // Raw noise from non-overlapping measurement pairs: d = T(m) - T(m+1) has
  // variance 2*sigma_n^2, so sigma_n^2 = E[d^2]/2 (zero-mean by construction).
  std::vector<double> noise_ss(L, 0.0);
  long n_pairs = 0;
  for (const auto& dev : dataset.devices) {
    const int m = int(dev.measurements.size());
    for (int p = 0; p + 1 < m; p += 2) {
      const Eigen::MatrixXd diff = kind.forward(dev.measurements[p]) -
                                   kind.forward(dev.measurements[p + 1]);
      for (int idx = 0; idx < L; ++idx)
        noise_ss[idx] += diff(idx / dataset.cols, idx % dataset.cols) *
                         diff(idx / dataset.cols, idx % dataset.cols);
      ++n_pairs;
    }
  }

  for (int idx = 0; idx < L; ++idx) {
    const bool has_spread = st.sigma[idx] > 0.0;
    st.usable[idx] = (idx != 0) && has_spread;  // index 1 (DC) never usable
    if (has_spread && n_pairs > 0)
      st.sigma_n[idx] = std::sqrt(noise_ss[idx] / (2.0 * n_pairs)) / st.sigma[idx];
  }
  return st;
}

Eigen::MatrixXd estimate_autocovariance(const std::vector<Eigen::VectorXd>& values) {
  if (values.size() < 2)
    throw std::invalid_argument("estimate_autocovariance: need at least 2 devices");
  const int L = int(values[0].size());
  for (const auto& v : values)
    if (v.size() != L)
      throw std::invalid_argument("estimate_autocovariance: ragged input vectors");
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(L);
  for (const auto& v : values) mean += v;
  mean /= double(values.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(L, L);
  for (const auto& v : values) {
    const Eigen::VectorXd d = v - mean;
    // Fill the upper triangle once and mirror so the result is exactly
    // symmetric in floating point.
    for (int i = 0; i < L; ++i)
      for (int j = i; j < L; ++j) cov(i, j) += d(i) * d(j);
  }
  cov /= double(values.size() - 1);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < i; ++j) cov(i, j) = cov(j, i);
  return cov;
}

std::string CoefficientStats::to_json() const {
  validate();
  json arr = json::array();
  for (int i = 0; i < size(); ++i)
    arr.push_back({{"index", i + 1},
                   {"mu", mu[i]},
                   {"sigma", sigma[i]},
                   {"sigma_n", sigma_n[i]},
                   {"usable", bool(usable[i])}});
  json doc = {{"rows", rows}, {"cols", cols}, {"coefficients", arr}};
  return doc.dump(2) + "\n";
}

CoefficientStats CoefficientStats::from_json(const std::string& text) {
  json doc = json::parse(text);
  CoefficientStats st;
  st.rows = doc.at("rows").get<int>();
  st.cols = doc.at("cols").get<int>();
  const int L = st.rows * st.cols;
  st.mu.assign(L, 0.0);
  st.sigma.assign(L, 0.0);
  st.sigma_n.assign(L, 0.0);
  st.usable.assign(L, 0);
  for (const auto& rec : doc.at("coefficients")) {
    const int idx = rec.at("index").get<int>() - 1;
    if (idx < 0 || idx >= L) throw std::invalid_argument("stats json: index out of range");
    st.mu[idx] = rec.at("mu").get<double>();
    st.sigma[idx] = rec.at("sigma").get<double>();
    st.sigma_n[idx] = rec.at("sigma_n").get<double>();
    st.usable[idx] = rec.at("usable").get<bool>() ? 1 : 0;
  }
  st.validate();
  return st;
}

namespace {

[[noreturn]] void csv_fail(long line, const std::string& what) {
  std::ostringstream msg;
  msg << "dataset csv line " << line << ": " << what;
  throw std::invalid_argument(msg.str());
}

}  // namespace

RODataset ingest_csv(std::istream& in) {
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw std::invalid_argument("dataset csv: empty stream");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "device,measurement,row,col,count")
    csv_fail(line_no, "bad header (expected device,measurement,row,col,count)");

  // device -> measurement -> (row,col) -> value
  std::map<std::int64_t, std::map<int, std::map<std::pair<int, int>, double>>> cells;
  int max_row = -1, max_col = -1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string f[5];
    for (int i = 0; i < 5; ++i)
      if (!std::getline(ls, f[i], ',')) csv_fail(line_no, "expected 5 comma-separated fields");
    std::string extra;
    if (std::getline(ls, extra, ',')) csv_fail(line_no, "expected 5 comma-separated fields");
    std::int64_t dev;
    int meas, row, col;
    double count;
    try {
      std::size_t pos;
      dev = std::stoll(f[0], &pos);
      if (pos != f[0].size()) throw std::invalid_argument("");
      meas = std::stoi(f[1], &pos);
      if (pos != f[1].size()) throw std::invalid_argument("");
      row = std::stoi(f[2], &pos);
      if (pos != f[2].size()) throw std::invalid_argument("");
      col = std::stoi(f[3], &pos);
      if (pos != f[3].size()) throw std::invalid_argument("");
      count = std::stod(f[4], &pos);
      if (pos != f[4].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      csv_fail(line_no, "non-numeric field");
    }
    if (row < 0 || col < 0 || meas < 0) csv_fail(line_no, "negative index");
    if (!std::isfinite(count)) csv_fail(line_no, "non-finite count");
    auto [it, fresh] = cells[dev][meas].try_emplace({row, col}, count);
    if (!fresh) csv_fail(line_no, "duplicate cell");
    max_row = std::max(max_row, row);
    max_col = std::max(max_col, col);
  }
  if (cells.empty()) throw std::invalid_argument("dataset csv: no data rows");

  RODataset ds;
  ds.rows = max_row + 1;
  ds.cols = max_col + 1;
  const std::size_t expected = std::size_t(ds.rows) * ds.cols;
  for (auto& [dev_id, meas_map] : cells) {
    DeviceRecord rec;
    rec.id = dev_id;
    for (auto& [meas_id, grid] : meas_map) {
      if (grid.size() != expected) {
        std::ostringstream msg;
        msg << "dataset csv: device " << dev_id << " measurement " << meas_id << " has "
            << grid.size() << " cells, expected " << expected;
        throw std::invalid_argument(msg.str());
      }
      Eigen::MatrixXd a(ds.rows, ds.cols);
      for (auto& [rc, v] : grid) a(rc.first, rc.second) = v;
      rec.measurements.push_back(std::move(a));
    }
    ds.devices.push_back(std::move(rec));
  }
  return ds;
}

void emit_csv(const RODataset& dataset, std::ostream& out) {
  out << "device,measurement,row,col,count\n";
  char buf[64];
  for (const auto& dev : dataset.devices)
    for (std::size_t m = 0; m < dev.measurements.size(); ++m)
      for (int r = 0; r < dataset.rows; ++r)
        for (int c = 0; c < dataset.cols; ++c) {
          std::snprintf(buf, sizeof buf, "%.17g", dev.measurements[m](r, c));
          out << dev.id << ',' << m << ',' << r << ',' << c << ',' << buf << '\n';
        }
}

}  // namespace pufkey
