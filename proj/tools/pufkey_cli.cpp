// pufkey: reproducible experiments over the RO-PUF key-binding pipeline.
// Exit status: 0 success, 2 validation/usage error, 3 decode failure.

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pufkey/analysis.hpp"
#include "pufkey/commit.hpp"
#include "pufkey/hwmodel.hpp"
#include "pufkey/numeric.hpp"
#include "pufkey/quantize.hpp"
#include "pufkey/source.hpp"

namespace {

using namespace pufkey;

// ------------------------------------------------------------ small helpers

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

// Bits files are a single line of '0'/'1' characters.
Bits read_bits_file(const std::string& path) {
  const std::string text = read_text_file(path);
  Bits bits;
  for (char c : text) {
    if (c == '0' || c == '1')
      bits.push_back(std::uint8_t(c - '0'));
    else if (c != '\n' && c != '\r' && c != ' ')
      throw std::runtime_error(path + ": not a bits file (offending byte '" +
                               std::string(1, c) + "')");
  }
  return bits;
}

void write_bits_file(const std::string& path, const Bits& bits) {
  std::string text(bits.size(), '0');
  for (std::size_t i = 0; i < bits.size(); ++i) text[i] = char('0' + (bits[i] & 1));
  text.push_back('\n');
  write_text_file(path, text);
}

// Keys on the command line are hex, MSB-first within each nibble: digit j
// carries bits 4j..4j+3 of the key.
Bits hex_to_bits(const std::string& hex) {
  Bits bits;
  bits.reserve(hex.size() * 4);
  for (char c : hex) {
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else if (c >= 'A' && c <= 'F') v = c - 'A' + 10;
    else throw std::runtime_error(std::string("bad hex digit '") + c + "'");
    for (int b = 3; b >= 0; --b) bits.push_back(std::uint8_t((v >> b) & 1));
  }
  return bits;
}

std::string bits_to_hex(const Bits& bits) {
  if (bits.size() % 4) throw std::runtime_error("key length not a nibble multiple");
  std::string hex;
  for (std::size_t i = 0; i < bits.size(); i += 4) {
    int v = 0;
    for (int b = 0; b < 4; ++b) v = (v << 1) | (bits[i + b] & 1);
    hex.push_back("0123456789abcdef"[v]);
  }
  return hex;
}

// Report tables render as CSV (default) or a JSON array of row objects;
// cells that parse as finite numbers stay numeric in JSON.
struct Table {
  std::vector<std::string> cols;
  std::vector<std::vector<std::string>> rows;
};

std::string render_table(const Table& t, const std::string& format) {
  if (format == "csv") {
    std::string out;
    for (std::size_t c = 0; c < t.cols.size(); ++c)
      out += (c ? "," : "") + t.cols[c];
    out += "\n";
    for (const auto& row : t.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out += (c ? "," : "") + row[c];
      out += "\n";
    }
    return out;
  }
  if (format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : t.rows) {
      nlohmann::json obj;
      for (std::size_t c = 0; c < row.size(); ++c) {
        try {
          std::size_t used = 0;
          const double v = std::stod(row[c], &used);
          if (used == row[c].size() && std::isfinite(v)) {
            obj[t.cols[c]] = v;
            continue;
          }
        } catch (const std::exception&) {
        }
        obj[t.cols[c]] = row[c];
      }
      arr.push_back(obj);
    }
    return arr.dump(2) + "\n";
  }
  throw std::runtime_error("unknown format: " + format);
}

void emit(const Table& t, const std::string& out_path, const std::string& format) {
  const std::string text = render_table(t, format);
  if (out_path.empty())
    std::cout << text;
  else
    write_text_file(out_path, text);
}

RODataset load_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  return ingest_csv(in);
}

// KLT has no closed form: refit deterministically from the device-mean
// autocovariance of the same dataset every time it is named.
Transform transform_for(const std::string& name, const RODataset& data) {
  if (name != "klt") return Transform::from_name(name);
  std::vector<Eigen::VectorXd> means;
  means.reserve(data.devices.size());
  for (const auto& dev : data.devices) {
    const Eigen::MatrixXd m = dev.mean_array();
    means.push_back(Eigen::Map<const Eigen::VectorXd>(m.transpose().data(), m.size()));
  }
  return klt_fit(estimate_autocovariance(means));
}

BitAllocation load_alloc(const std::string& path) {
  return BitAllocation::from_json(read_text_file(path));
}

CoefficientStats load_stats(const std::string& path) {
  return CoefficientStats::from_json(read_text_file(path));
}

// Shared by allocate / analyze uniqueness.
struct MetricFlags {
  std::string metric = "fixed-errors";
  double p_b = 0.06;
  int c_max = 19;
  int max_bits = 8;
  std::optional<int> force_k;
  double target = 1e-9;

  void attach(CLI::App* cmd) {
    cmd->add_option("--metric", metric, "fixed-bsc (distortion cap) or fixed-errors (correctness threshold)")
        ->check(CLI::IsMember({"fixed-bsc", "fixed-errors"}))
        ->capture_default_str();
    cmd->add_option("--p-b", p_b, "fixed-bsc: per-bit error cap")->capture_default_str();
    cmd->add_option("--c-max", c_max, "fixed-errors: tolerated coefficient errors")
        ->capture_default_str();
    cmd->add_option("--max-bits", max_bits, "fixed-bsc: per-coefficient bit cap")
        ->capture_default_str();
    auto* fk = cmd->add_option("--force-k", "fixed-errors: cap every coefficient at K bits");
    fk->each([this](const std::string& v) { force_k = std::stoi(v); });
    cmd->add_option("--target", target, "fixed-errors: block-failure target")
        ->capture_default_str();
  }

  BitAllocation run(const CoefficientStats& stats) const {
    if (metric == "fixed-bsc") return allocate_fixed_bsc(stats, p_b, max_bits);
    return allocate_fixed_errors(stats, c_max, force_k, target);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RO-PUF transform-coding key binding: data generation, quantizer design,\n"
               "fuzzy commitment, and performance analysis."};
  app.require_subcommand(1);
  std::string format = "csv";
  app.add_option("--format", format, "report encoding: csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();

  // ----------------------------------------------------------------- gen
  auto* gen = app.add_subcommand("gen", "Synthesize an RO dataset CSV");
  struct {
    int rows = 16, cols = 16, devices = 0, measurements = 0;
    std::uint64_t seed = 0;
    double mean = 30000.0, sigma_x = 430.0, rho = 0.97, noise_sd = 5.0;
    std::string out;
  } g;
  gen->add_option("--rows", g.rows)->capture_default_str();
  gen->add_option("--cols", g.cols)->capture_default_str();
  gen->add_option("--devices", g.devices, "number of devices")->required();
  gen->add_option("--measurements", g.measurements, "measurements per device")->required();
  gen->add_option("--seed", g.seed, "RNG seed (stochastic command)")->required();
  gen->add_option("--mean", g.mean, "mean RO count")->capture_default_str();
  gen->add_option("--sigma-x", g.sigma_x, "across-device count deviation")->capture_default_str();
  gen->add_option("--rho", g.rho, "neighbor correlation, in [0,1)")->capture_default_str();
  gen->add_option("--noise-sd", g.noise_sd, "per-measurement noise deviation")
      ->capture_default_str();
  gen->add_option("--out", g.out, "output CSV path")->required();

  // ----------------------------------------------------------------- stats
  auto* stats_cmd = app.add_subcommand("stats", "Estimate per-coefficient statistics");
  struct {
    std::string in, transform = "dwht", out;
  } st;
  stats_cmd->add_option("--in", st.in, "dataset CSV")->required();
  stats_cmd->add_option("--transform", st.transform, "dct | dwht | dht | klt")
      ->check(CLI::IsMember({"dct", "dwht", "dht", "klt"}))
      ->capture_default_str();
  stats_cmd->add_option("--out", st.out, "stats JSON path")->required();

  // -------------------------------------------------------------- allocate
  auto* alloc_cmd = app.add_subcommand("allocate", "Design the per-coefficient bit allocation");
  struct {
    std::string stats, out;
  } al;
  MetricFlags alloc_metric;
  alloc_cmd->add_option("--stats", al.stats, "stats JSON")->required();
  alloc_metric.attach(alloc_cmd);
  alloc_cmd->add_option("--out", al.out, "allocation JSON path")->required();

  // --------------------------------------------------------------- extract
  auto* extract_cmd = app.add_subcommand("extract", "Extract the bit string of one device");
  struct {
    std::string in, transform = "dwht", stats, alloc, out;
    std::int64_t device = 0;
    int measurement = -1;  // -1 = device mean (enrollment convention)
  } ex;
  extract_cmd->add_option("--in", ex.in, "dataset CSV")->required();
  extract_cmd->add_option("--device", ex.device, "device id")->required();
  extract_cmd->add_option("--measurement", ex.measurement,
                          "measurement index; omit to use the device mean array")
      ->capture_default_str();
  extract_cmd->add_option("--transform", ex.transform)
      ->check(CLI::IsMember({"dct", "dwht", "dht", "klt"}))
      ->capture_default_str();
  extract_cmd->add_option("--stats", ex.stats, "stats JSON")->required();
  extract_cmd->add_option("--alloc", ex.alloc, "allocation JSON")->required();
  extract_cmd->add_option("--out", ex.out, "bits file path")->required();

  // ---------------------------------------------------------------- enroll
  auto* enroll_cmd = app.add_subcommand("enroll", "Bind a key to enrollment bits");
  struct {
    std::string key_hex, bits, code = "rm32_6+rs28_22", alloc, out;
  } en;
  enroll_cmd->add_option("--key", en.key_hex, "key as hex (nibbles MSB-first)")->required();
  enroll_cmd->add_option("--bits", en.bits, "enrollment bits file (x)")->required();
  enroll_cmd->add_option("--code", en.code, "code registry name")->capture_default_str();
  enroll_cmd->add_option("--alloc", en.alloc, "allocation JSON (digest goes in the header)")
      ->required();
  enroll_cmd->add_option("--out", en.out, "helper-data file path")->required();

  // ----------------------------------------------------------- reconstruct
  auto* recon_cmd = app.add_subcommand("reconstruct", "Recover the key from helper data");
  struct {
    std::string helper, bits, code = "rm32_6+rs28_22", alloc;
    int key_bits = 128;
  } rc;
  recon_cmd->add_option("--helper", rc.helper, "helper-data file")->required();
  recon_cmd->add_option("--bits", rc.bits, "re-measurement bits file (y)")->required();
  recon_cmd->add_option("--code", rc.code)->capture_default_str();
  recon_cmd->add_option("--alloc", rc.alloc, "allocation JSON")->required();
  recon_cmd->add_option("--key-bits", rc.key_bits)->capture_default_str();

  // ---------------------------------------------------------------- analyze
  auto* analyze = app.add_subcommand("analyze", "Quantitative reports");
  analyze->require_subcommand(1);

  auto* pb = analyze->add_subcommand("pb", "Block-failure probability");
  struct {
    std::string method = "binomial", profile, code, out;
    int n = 0, t = -1, d = 0;
    double p = 0.0, p_err = 0.0, p_era = 0.0;
  } pbf;
  pb->add_option("--method", pbf.method, "binomial | ee | dftcf | dp")
      ->check(CLI::IsMember({"binomial", "ee", "dftcf", "dp"}))
      ->capture_default_str();
  pb->add_option("--n", pbf.n, "block length (binomial/ee)");
  pb->add_option("--t", pbf.t, "correctable errors; defaults to the code's t");
  pb->add_option("--d", pbf.d, "minimum distance (ee)");
  pb->add_option("--p", pbf.p, "crossover (binomial)");
  pb->add_option("--p-err", pbf.p_err, "symbol error probability (ee)");
  pb->add_option("--p-era", pbf.p_era, "symbol erasure probability (ee)");
  pb->add_option("--profile", pbf.profile,
                 "stats JSON; q_i = 1 - P_c(1, sigma_n_i) over usable coefficients "
                 "(dftcf/dp)");
  pb->add_option("--code", pbf.code, "code registry name supplying t");
  pb->add_option("--out", pbf.out, "report path (default stdout)");

  auto* rates = analyze->add_subcommand("rates", "Achievable rate-region boundaries");
  struct {
    double p = 0.06;
    int alpha_steps = 51;
    std::string out;
  } rt;
  rates->add_option("--p", rt.p, "measurement-channel crossover")->capture_default_str();
  rates->add_option("--alpha-steps", rt.alpha_steps, "test-channel grid size")
      ->capture_default_str();
  rates->add_option("--out", rt.out, "report path (default stdout)");

  auto* smax_cmd = analyze->add_subcommand("smax", "Maximum secret length sweep");
  struct {
    double p_min = 0.0, p_max = 0.2;
    int steps = 101, n = 255;
    std::string out;
  } sm;
  smax_cmd->add_option("--p-min", sm.p_min)->capture_default_str();
  smax_cmd->add_option("--p-max", sm.p_max)->capture_default_str();
  smax_cmd->add_option("--steps", sm.steps)->capture_default_str();
  smax_cmd->add_option("--n", sm.n, "extracted bits N")->capture_default_str();
  smax_cmd->add_option("--out", sm.out, "report path (default stdout)");

  auto* uniq = analyze->add_subcommand("uniqueness", "Between-device distance statistics");
  struct {
    std::string in, transform = "dwht", out;
  } uq;
  MetricFlags uniq_metric;
  uniq_metric.force_k = 1;  // the 1-bit-per-coefficient configuration
  uniq->add_option("--in", uq.in, "dataset CSV")->required();
  uniq->add_option("--transform", uq.transform)
      ->check(CLI::IsMember({"dct", "dwht", "dht", "klt"}))
      ->capture_default_str();
  uniq_metric.attach(uniq);
  uniq->add_option("--out", uq.out, "report path (default stdout)");

  auto* eta = analyze->add_subcommand("eta", "Decorrelation efficiency");
  struct {
    std::string in, transform = "dwht", out;
    int rows = 16, cols = 16;
    double sigma_x = 430.0, rho = 0.97;
  } et;
  eta->add_option("--in", et.in, "dataset CSV (model covariance when omitted)");
  eta->add_option("--transform", et.transform)
      ->check(CLI::IsMember({"dct", "dwht", "dht", "klt"}))
      ->capture_default_str();
  eta->add_option("--rows", et.rows)->capture_default_str();
  eta->add_option("--cols", et.cols)->capture_default_str();
  eta->add_option("--sigma-x", et.sigma_x)->capture_default_str();
  eta->add_option("--rho", et.rho)->capture_default_str();
  eta->add_option("--out", et.out, "report path (default stdout)");

  auto* rmmc = analyze->add_subcommand("rm-mc", "RM(1,5) MLD channel Monte Carlo");
  struct {
    double p = 0.06;
    long long trials = 10000000;
    std::uint64_t seed = 0;
    int threads = 0;
    std::string out;
  } rm;
  rmmc->add_option("--p", rm.p, "BSC crossover")->capture_default_str();
  rmmc->add_option("--trials", rm.trials)->capture_default_str();
  rmmc->add_option("--seed", rm.seed, "RNG seed (stochastic command)")->required();
  rmmc->add_option("--threads", rm.threads, "0 = hardware concurrency")->capture_default_str();
  rmmc->add_option("--out", rm.out, "report path (default stdout)");

  // --------------------------------------------------------------------- hw
  auto* hw = app.add_subcommand("hw", "Fixed-point hardware model");
  hw->require_subcommand(1);

  auto* hwd = hw->add_subcommand("dwht", "Fixed 16x16 DWHT fuzz check / schedule dump");
  struct {
    int fuzz = 1000;
    std::uint64_t seed = 1;
    std::string schedule_out, out;
  } hd;
  hwd->add_option("--fuzz", hd.fuzz, "random 16-bit arrays to test")->capture_default_str();
  hwd->add_option("--seed", hd.seed)->capture_default_str();
  hwd->add_option("--schedule-out", hd.schedule_out, "emit the butterfly schedule CSV");
  hwd->add_option("--out", hd.out, "report path (default stdout)");

  auto* hwr = hw->add_subcommand("rom", "Quantizer boundary ROM");
  struct {
    std::string stats, alloc, out;
  } hr;
  hwr->add_option("--stats", hr.stats, "stats JSON")->required();
  hwr->add_option("--alloc", hr.alloc, "allocation JSON")->required();
  hwr->add_option("--out", hr.out, "ROM image path")->required();

  auto* hwt = hw->add_subcommand("timing", "Counter overload timing");
  struct {
    int width = 16;
    double fmax = 500e6, window = 100e-6;
    std::string out;
  } ht;
  hwt->add_option("--width", ht.width, "counter width bits")->capture_default_str();
  hwt->add_option("--fmax", ht.fmax, "max RO frequency Hz")->capture_default_str();
  hwt->add_option("--window", ht.window, "counting window seconds")->capture_default_str();
  hwt->add_option("--out", ht.out, "report path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc_code = app.exit(e);
    return rc_code == 0 ? 0 : 2;  // help/version exit 0; usage errors exit 2
  }

  try {
    if (*gen) {
      const SourceModel model = SourceModel::exponential(
          g.rows, g.cols, g.mean, g.sigma_x * g.sigma_x, g.rho, g.noise_sd * g.noise_sd);
      const RODataset data = synth_dataset(model, g.devices, g.measurements, g.seed);
      std::ofstream out(g.out, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open for writing: " + g.out);
      emit_csv(data, out);
    } else if (*stats_cmd) {
      const RODataset data = load_dataset(st.in);
      const CoefficientStats cs = estimate_stats(data, transform_for(st.transform, data));
      write_text_file(st.out, cs.to_json());
    } else if (*alloc_cmd) {
      const BitAllocation alloc = alloc_metric.run(load_stats(al.stats));
      write_text_file(al.out, alloc.to_json());
      std::fprintf(stderr, "N=%d e=%d d_min>=%d digest=%016" PRIx64 "\n",
                   alloc.total_bits(), alloc.worst_case_errors(),
                   alloc.d_min_required(), alloc.digest());
    } else if (*extract_cmd) {
      const RODataset data = load_dataset(ex.in);
      const DeviceRecord* dev = nullptr;
      for (const auto& d : data.devices)
        if (d.id == ex.device) dev = &d;
      if (!dev) throw std::runtime_error("no such device id");
      if (ex.measurement >= int(dev->measurements.size()))
        throw std::runtime_error("no such measurement index");
      const Eigen::MatrixXd array =
          ex.measurement < 0 ? dev->mean_array() : dev->measurements[ex.measurement];
      const Bits bits = extract_bits(array, transform_for(ex.transform, data),
                                     load_stats(ex.stats), load_alloc(ex.alloc));
      write_bits_file(ex.out, bits);
    } else if (*enroll_cmd) {
      const Bits key = hex_to_bits(en.key_hex);
      const Bits x = read_bits_file(en.bits);
      const Code code = Code::from_name(en.code);
      const BitAllocation alloc = load_alloc(en.alloc);
      if (alloc.total_bits() != code.n())
        throw std::runtime_error("allocation yields " + std::to_string(alloc.total_bits()) +
                                 " bits but the code block length is " +
                                 std::to_string(code.n()));
      write_helper_file(en.out, enroll(key, x, code, alloc.digest()));
    } else if (*recon_cmd) {
      const HelperData helper = read_helper_file(rc.helper);
      const Bits y = read_bits_file(rc.bits);
      const Code code = Code::from_name(rc.code);
      const BitAllocation alloc = load_alloc(rc.alloc);
      const ReconstructOutcome out = reconstruct(helper, y, code, alloc.digest(), rc.key_bits);
      if (!out.ok()) {
        std::fprintf(stderr, "decode failure: the re-measurement is outside the code's "
                             "correction capability\n");
        return 3;
      }
      std::cout << bits_to_hex(out.key) << "\n";
    } else if (*pb) {
      Table t{{"method", "n", "t", "params", "P_B"}, {}};
      if (pbf.method == "binomial") {
        if (pbf.n <= 0 || pbf.t < 0) throw std::runtime_error("binomial needs --n and --t");
        t.rows.push_back({pbf.method, std::to_string(pbf.n), std::to_string(pbf.t),
                          "p=" + fmt(pbf.p), fmt(binomial_tail(pbf.n, pbf.p, pbf.t))});
      } else if (pbf.method == "ee") {
        if (pbf.n <= 0 || pbf.d <= 0) throw std::runtime_error("ee needs --n and --d");
        t.rows.push_back({pbf.method, std::to_string(pbf.n), std::to_string(pbf.d),
                          "p_err=" + fmt(pbf.p_err) + ";p_era=" + fmt(pbf.p_era),
                          fmt(ee_tail(pbf.n, pbf.d, pbf.p_err, pbf.p_era))});
      } else {
        if (pbf.profile.empty()) throw std::runtime_error(pbf.method + " needs --profile");
        const CoefficientStats cs = load_stats(pbf.profile);
        std::vector<double> q;
        for (int i = 0; i < cs.size(); ++i)
          if (cs.usable[i]) q.push_back(1.0 - correctness(1, cs.sigma_n[i]));
        int t_errors = pbf.t;
        if (!pbf.code.empty() && t_errors < 0) t_errors = Code::from_name(pbf.code).t();
        if (t_errors < 0) throw std::runtime_error("need --t or --code");
        const double tail = pbf.method == "dftcf"
                                ? poisson_binomial_tail_dftcf(q, t_errors)
                                : poisson_binomial_tail_dp(q, t_errors);
        t.rows.push_back({pbf.method, std::to_string(q.size()), std::to_string(t_errors),
                          pbf.code.empty() ? std::string("profile") : "code=" + pbf.code,
                          fmt(tail)});
      }
      emit(t, pbf.out, format);
    } else if (*rates) {
      Table t{{"source", "alpha", "Rs", "Rl"}, {}};
      const FcRegion fc = fc_region(rt.p);
      for (const RatePoint& b : fc.boundary)
        t.rows.push_back({"fc", "", fmt(b.rs), fmt(b.rl)});
      std::vector<double> alphas;
      for (int i = 0; i < rt.alpha_steps; ++i)
        alphas.push_back(0.5 * double(i) / double(rt.alpha_steps - 1));
      for (const CsPoint& cp : cs_region_mgl(rt.p, alphas))
        t.rows.push_back({"cs", fmt(cp.alpha), fmt(cp.rate.rs), fmt(cp.rate.rl)});
      t.rows.push_back({"reference", "", fmt(kFiniteLengthReference.rs),
                        fmt(kFiniteLengthReference.rl)});
      emit(t, rt.out, format);
    } else if (*smax_cmd) {
      if (sm.steps < 2 || sm.p_min > sm.p_max) throw std::runtime_error("bad sweep grid");
      Table t{{"p_b", "N", "Smax"}, {}};
      for (int i = 0; i < sm.steps; ++i) {
        const double p = sm.p_min + (sm.p_max - sm.p_min) * double(i) / double(sm.steps - 1);
        t.rows.push_back({fmt(p), std::to_string(sm.n), fmt(smax(p, sm.n))});
      }
      emit(t, sm.out, format);
    } else if (*uniq) {
      const RODataset data = load_dataset(uq.in);
      const Transform tr = transform_for(uq.transform, data);
      const CoefficientStats cs = estimate_stats(data, tr);
      const BitAllocation alloc = uniq_metric.run(cs);
      std::vector<Bits> sequences;
      for (const auto& dev : data.devices) {
        if (dev.measurements.empty()) continue;
        sequences.push_back(extract_bits(dev.measurements.front(), tr, cs, alloc));
      }
      const UniquenessStats us = uniqueness(sequences);
      Table t{{"pair_count", "mean", "variance"},
              {{std::to_string(us.pairs), fmt(us.mean), fmt(us.variance)}}};
      emit(t, uq.out, format);
    } else if (*eta) {
      Eigen::MatrixXd cov;
      int rows = et.rows, cols = et.cols;
      if (et.in.empty()) {
        cov = SourceModel::exponential(rows, cols, 0.0, et.sigma_x * et.sigma_x, et.rho, 0.0)
                  .cov;
      } else {
        const RODataset data = load_dataset(et.in);
        rows = data.rows, cols = data.cols;
        std::vector<Eigen::VectorXd> means;
        for (const auto& dev : data.devices) {
          const Eigen::MatrixXd m = dev.mean_array();
          means.push_back(Eigen::Map<const Eigen::VectorXd>(m.transpose().data(), m.size()));
        }
        cov = estimate_autocovariance(means);
      }
      const Transform tr = et.transform == "klt" ? klt_fit(cov)
                                                 : Transform::from_name(et.transform);
      const Eigen::MatrixXd a = tr.matrix(rows, cols);
      const double val = decorrelation_efficiency(a * cov * a.transpose(), cov);
      Table t{{"transform", "eta_c"}, {{et.transform, fmt(val)}}};
      emit(t, et.out, format);
    } else if (*rmmc) {
      const RmChannelEstimate est = rm_channel_mc(rm.p, rm.trials, rm.seed, rm.threads);
      Table t{{"p", "trials", "p_era", "se_era", "p_err", "se_err"},
              {{fmt(rm.p), std::to_string(est.trials), fmt(est.p_era), fmt(est.se_era),
                fmt(est.p_err), fmt(est.se_err)}}};
      emit(t, rm.out, format);
    } else if (*hwd) {
      if (!hd.schedule_out.empty()) {
        Table t{{"pass", "i0", "i1", "i2", "i3"}, {}};
        for (const ButterflyQuad& q : dwht_schedule())
          t.rows.push_back({std::to_string(q.pass), std::to_string(q.index[0]),
                            std::to_string(q.index[1]), std::to_string(q.index[2]),
                            std::to_string(q.index[3])});
        emit(t, hd.schedule_out, format);
      }
      CounterRng rng(hd.seed);
      const Transform tr = Transform::dwht();
      double max_err = 0.0;
      for (int trial = 0; trial < hd.fuzz; ++trial) {
        Grid16 grid;
        Eigen::MatrixXd m(16, 16);
        for (int r = 0; r < 16; ++r)
          for (int c = 0; c < 16; ++c) {
            const std::int32_t v = std::int32_t(rng.next_u64() & 0xFFFF) - 32768;
            grid[16 * r + c] = v;
            m(r, c) = double(v);
          }
        const Grid16 fixed = dwht2d_fixed(grid);  // throws if any stage tops 20 bits
        const Eigen::MatrixXd ref = tr.forward(m);
        for (int r = 0; r < 16; ++r)
          for (int c = 0; c < 16; ++c)
            max_err = std::max(max_err, std::abs(double(fixed[16 * r + c]) - ref(r, c)));
      }
      // Worst case of the truncation recurrence E <- 2E + 1/2 over 4 stages.
      Table t{{"arrays", "max_abs_error", "bound"},
              {{std::to_string(hd.fuzz), fmt(max_err), "7.5"}}};
      emit(t, hd.out, format);
    } else if (*hwr) {
      const RomImage rom = quantizer_rom(load_alloc(hr.alloc), load_stats(hr.stats));
      write_rom_file(hr.out, rom);
      std::fprintf(stderr, "words=%zu word_bits=%d packed_bytes=%zu\n", rom.words.size(),
                   rom.word_bits, rom.total_bytes());
    } else if (*hwt) {
      const double tmin = counter_overload_time(ht.width, ht.fmax);
      Table t{{"width_bits", "f_max_hz", "T_min_s", "window_s", "window_safe"},
              {{std::to_string(ht.width), fmt(ht.fmax), fmt(tmin), fmt(ht.window),
                counter_window_safe(ht.width, ht.fmax, ht.window) ? "1" : "0"}}};
      emit(t, ht.out, format);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
