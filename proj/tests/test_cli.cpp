// End-to-end checks against the installed command-line binary. Every case
// shells out to the real executable; nothing here links the library except
// to cross-read artifact files.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pufkey/quantize.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = PUFKEY_CLI_PATH;

struct RunResult {
  int exit_code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunResult run(const std::string& args, const fs::path& dir) {
  const fs::path out = dir / "stdout.txt", err = dir / "stderr.txt";
  const std::string cmd =
      kCli + " " + args + " > " + out.string() + " 2> " + err.string();
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    rows.push_back(std::move(fields));
  }
  return rows;
}

// Shared scratch directory; the pipeline artifacts are produced once and
// reused by the later cases.
struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::current_path() / "cli_scratch";
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  fs::path p(const char* name) const { return dir / name; }
};

Workspace& ws() {
  static Workspace w;
  return w;
}

}  // namespace

TEST_CASE("gen writes the expected row count and is seed-deterministic") {
  auto& w = ws();
  const std::string base = "gen --rows 8 --cols 8 --devices 3 --measurements 2 "
                           "--seed 11 --out ";
  const RunResult a = run(base + w.p("gen_a.csv").string(), w.dir);
  REQUIRE(a.exit_code == 0);
  const std::string text_a = slurp(w.p("gen_a.csv"));
  CHECK(parse_csv(text_a).size() == 1 + 3 * 2 * 64);
  CHECK(parse_csv(text_a)[0] ==
        std::vector<std::string>{"device", "measurement", "row", "col", "count"});

  const RunResult b = run(base + w.p("gen_b.csv").string(), w.dir);
  REQUIRE(b.exit_code == 0);
  CHECK(slurp(w.p("gen_b.csv")) == text_a);  // byte-identical

  const RunResult c = run("gen --rows 8 --cols 8 --devices 3 --measurements 2 "
                          "--seed 12 --out " + w.p("gen_c.csv").string(), w.dir);
  REQUIRE(c.exit_code == 0);
  CHECK(slurp(w.p("gen_c.csv")) != text_a);
}

TEST_CASE("invalid model parameters exit with code 2") {
  auto& w = ws();
  const RunResult r = run("gen --rows 4 --cols 4 --devices 2 --measurements 1 "
                          "--seed 1 --rho 1.5 --out " + w.p("bad.csv").string(), w.dir);
  CHECK(r.exit_code == 2);
  CHECK(!r.err.empty());
  CHECK(run("no-such-command", w.dir).exit_code == 2);
}

TEST_CASE("full pipeline: gen, stats, allocate, extract, enroll, reconstruct") {
  auto& w = ws();
  // Low measurement noise and enough devices keep every non-DC coefficient
  // above the single-bit correctness threshold.
  REQUIRE(run("gen --rows 16 --cols 16 --devices 30 --measurements 3 --seed 7 "
              "--noise-sd 0.1 --out " + w.p("ds.csv").string(), w.dir)
              .exit_code == 0);
  REQUIRE(run("stats --in " + w.p("ds.csv").string() + " --transform dwht --out " +
              w.p("stats.json").string(), w.dir)
              .exit_code == 0);

  const RunResult alloc =
      run("allocate --stats " + w.p("stats.json").string() +
          " --metric fixed-errors --c-max 19 --force-k 1 --out " +
          w.p("alloc.json").string(), w.dir);
  REQUIRE(alloc.exit_code == 0);
  // The design summary goes to stderr, the artifact to the file.
  CHECK(alloc.err.find("N=255") != std::string::npos);
  CHECK(alloc.err.find("e=19") != std::string::npos);
  CHECK(alloc.err.find("d_min>=39") != std::string::npos);
  const auto parsed = pufkey::BitAllocation::from_json(slurp(w.p("alloc.json")));
  CHECK(parsed.total_bits() == 255);

  // Enrollment bits come from the device mean (the default when --measurement
  // is not given), re-measurement bits from a single shot.
  REQUIRE(run("extract --in " + w.p("ds.csv").string() + " --device 0 "
              "--transform dwht --stats " + w.p("stats.json").string() + " --alloc " +
              w.p("alloc.json").string() + " --out " + w.p("x.bits").string(), w.dir)
              .exit_code == 0);
  REQUIRE(run("extract --in " + w.p("ds.csv").string() + " --device 0 --measurement 0 "
              "--transform dwht --stats " + w.p("stats.json").string() + " --alloc " +
              w.p("alloc.json").string() + " --out " + w.p("y.bits").string(), w.dir)
              .exit_code == 0);
  std::string xbits = slurp(w.p("x.bits"));
  CHECK(std::count(xbits.begin(), xbits.end(), '0') +
            std::count(xbits.begin(), xbits.end(), '1') == 255);

  const std::string key = "00112233445566778899aabbccddeeff";
  REQUIRE(run("enroll --key " + key + " --bits " + w.p("x.bits").string() +
              " --code bch255_131 --alloc " + w.p("alloc.json").string() + " --out " +
              w.p("helper.fcs").string(), w.dir)
              .exit_code == 0);

  const RunResult rec =
      run("reconstruct --helper " + w.p("helper.fcs").string() + " --bits " +
          w.p("y.bits").string() + " --code bch255_131 --alloc " +
          w.p("alloc.json").string(), w.dir);
  REQUIRE(rec.exit_code == 0);
  CHECK(rec.out.find(key) != std::string::npos);
}

TEST_CASE("reconstruct exits 3 when the noise exceeds the code") {
  auto& w = ws();
  REQUIRE(fs::exists(w.p("helper.fcs")));  // produced by the pipeline case
  std::string y = slurp(w.p("y.bits"));
  int flipped = 0;
  for (char& ch : y) {
    if (flipped >= 200) break;
    if (ch == '0') ch = '1', ++flipped;
    else if (ch == '1') ch = '0', ++flipped;
  }
  REQUIRE(flipped == 200);
  std::ofstream(w.p("y_bad.bits")) << y;

  const RunResult rec =
      run("reconstruct --helper " + w.p("helper.fcs").string() + " --bits " +
          w.p("y_bad.bits").string() + " --code bch255_131 --alloc " +
          w.p("alloc.json").string(), w.dir);
  CHECK(rec.exit_code == 3);
  CHECK(rec.err.find("decode") != std::string::npos);

  // A mismatched allocation digest is a hard usage error, not a decode
  // failure: design a different allocation from the same stats and try it.
  REQUIRE(run("allocate --stats " + w.p("stats.json").string() +
              " --metric fixed-bsc --p-b 0.06 --out " + w.p("alloc_bsc.json").string(),
              w.dir)
              .exit_code == 0);
  const RunResult wrong =
      run("reconstruct --helper " + w.p("helper.fcs").string() + " --bits " +
          w.p("y.bits").string() + " --code bch255_131 --alloc " +
          w.p("alloc_bsc.json").string(), w.dir);
  CHECK(wrong.exit_code == 2);
  CHECK(wrong.err.find("digest") != std::string::npos);
}

TEST_CASE("rate-region report carries the known anchors") {
  auto& w = ws();
  const RunResult r = run("analyze rates --p 0.0097 --out " +
                          w.p("rates.csv").string(), w.dir);
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_csv(slurp(w.p("rates.csv")));
  REQUIRE(rows.size() > 3);
  CHECK(rows[0] == std::vector<std::string>{"source", "alpha", "Rs", "Rl"});
  bool found_cs0 = false, found_ref = false;
  for (const auto& row : rows) {
    if (row[0] == "cs" && std::stod(row[1]) == 0.0) {
      found_cs0 = true;
      CHECK(std::stod(row[2]) == doctest::Approx(0.922).epsilon(1.2e-3));
      CHECK(std::stod(row[3]) == doctest::Approx(0.079).epsilon(1.5e-2));
    }
    if (row[0] == "reference") {
      found_ref = true;
      CHECK(std::stod(row[2]) == doctest::Approx(0.691));
      CHECK(std::stod(row[3]) == doctest::Approx(0.309));
    }
  }
  CHECK(found_cs0);
  CHECK(found_ref);
}

TEST_CASE("block-failure report matches the frozen binomial value") {
  auto& w = ws();
  const RunResult r = run("analyze pb --method binomial --n 256 --p 0.010368 --t 17",
                          w.dir);
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 2);
  // Relative comparison by hand: Approx adds an absolute term that would
  // swamp a 1e-10 value.
  const double got = std::stod(rows[1][4]);
  CHECK(std::abs(got - 3.48442015166e-10) < 1e-6 * 3.48442015166e-10);

  // Profile mode: single-bit error probabilities from the estimated stats,
  // capability from the named code. The design target must be met.
  const RunResult prof = run("analyze pb --method dftcf --profile " +
                             w.p("stats.json").string() + " --code bch255_131", w.dir);
  REQUIRE(prof.exit_code == 0);
  const auto prows = parse_csv(prof.out);
  REQUIRE(prows.size() == 2);
  const double pb = std::stod(prows[1][4]);
  CHECK(pb >= 0.0);
  CHECK(pb <= 1e-9);
}

TEST_CASE("reports are reproducible and json mode is well-formed") {
  auto& w = ws();
  const std::string cmd = "analyze smax --p-min 0 --p-max 0.2 --steps 51 --n 255";
  const RunResult a = run(cmd, w.dir);
  const RunResult b = run(cmd, w.dir);
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  const auto rows = parse_csv(a.out);
  REQUIRE(rows.size() == 52);
  CHECK(std::stod(rows[1][2]) == doctest::Approx(255.0));  // S_max(0) = N

  const RunResult j = run("--format json " + cmd, w.dir);
  REQUIRE(j.exit_code == 0);
  const auto doc = nlohmann::json::parse(j.out);
  REQUIRE(doc.is_array());
  CHECK(doc.size() == 51);
  CHECK(doc[0].contains("Smax"));
  CHECK(doc[0]["Smax"].get<double>() == doctest::Approx(255.0));
}

TEST_CASE("decorrelation efficiency of the default source model") {
  auto& w = ws();
  for (const auto& [name, eta] : std::vector<std::pair<std::string, double>>{
           {"dct", 0.999037}, {"dwht", 0.996606}, {"dht", 0.994833}}) {
    const RunResult r = run("analyze eta --transform " + name, w.dir);
    REQUIRE(r.exit_code == 0);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 2);
    CHECK(rows[1][0] == name);
    CHECK(std::stod(rows[1][1]) == doctest::Approx(eta).epsilon(1e-5));
  }
}

TEST_CASE("hardware reports") {
  auto& w = ws();
  const RunResult t = run("hw timing --width 16 --fmax 500e6 --window 100e-6", w.dir);
  REQUIRE(t.exit_code == 0);
  const auto trows = parse_csv(t.out);
  REQUIRE(trows.size() == 2);
  CHECK(std::stod(trows[1][2]) == doctest::Approx(0.00013107).epsilon(1e-12));
  CHECK(trows[1][4] == "1");

  const RunResult d = run("hw dwht --fuzz 500 --seed 9", w.dir);
  REQUIRE(d.exit_code == 0);
  const auto drows = parse_csv(d.out);
  REQUIRE(drows.size() == 2);
  CHECK(std::stod(drows[1][1]) < 7.5);   // max |fixed - float|
  CHECK(std::stod(drows[1][2]) == doctest::Approx(7.5));  // documented bound

  const RunResult rom = run("hw rom --stats " + w.p("stats.json").string() +
                            " --alloc " + w.p("alloc.json").string() + " --out " +
                            w.p("q.rom").string(), w.dir);
  REQUIRE(rom.exit_code == 0);
  CHECK(rom.err.find("words=255") != std::string::npos);
  CHECK(rom.err.find("packed_bytes=638") != std::string::npos);
  CHECK(fs::file_size(w.p("q.rom")) > 255 * 3);
}

TEST_CASE("uniqueness report on a fresh population") {
  auto& w = ws();
  REQUIRE(run("gen --rows 16 --cols 16 --devices 40 --measurements 2 --seed 21 "
              "--noise-sd 0.1 --out " + w.p("uniq.csv").string(), w.dir)
              .exit_code == 0);
  const RunResult r = run("analyze uniqueness --in " + w.p("uniq.csv").string() +
                          " --transform dwht --c-max 19", w.dir);
  REQUIRE(r.exit_code == 0);
  const auto rows = parse_csv(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(std::stoll(rows[1][0]) == 40 * 39 / 2);
  CHECK(std::stod(rows[1][1]) == doctest::Approx(0.5).epsilon(0.04));
  CHECK(std::stod(rows[1][2]) < 2e-3);
}
