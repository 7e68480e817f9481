// Copyright 2026 The nocsim Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "expect_error.hpp"
#include "nocsim/config.hpp"
#include "nocsim/sweep.hpp"

namespace noc {
namespace {

namespace fs = std::filesystem;

const fs::path kData = NOCSIM_TEST_DATA;

struct Invocation {
  int exit_code = -1;
  std::string out;
};

Invocation cli(const std::string& args) {
  const std::string cmd = std::string("\"") + NOCSIM_CLI + "\" " + args + " 2>/dev/null";
  Invocation r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("nocsim_cli_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

const std::string kMesh3 =
    "topology.kind = mesh\ntopology.width = 3\ntopology.height = 3\nrouting.algorithm = xy\n";

// ---- config parsing ---------------------------------------------------------

TEST(Config, Defaults) {
  ExperimentConfig x = parse_config(kMesh3);
  EXPECT_EQ(x.sim.topology.kind, TopologyKind::kMesh);
  EXPECT_EQ(x.sim.topology.width, 3);
  EXPECT_EQ(x.sim.fabric.switching, Switching::kWormhole);
  EXPECT_EQ(x.sim.seed, 1u);
  EXPECT_EQ(x.rates, std::vector<double>{0.0});
  EXPECT_EQ(x.seeds, std::vector<std::uint64_t>{1});
  EXPECT_EQ(x.algorithms, std::vector<Algorithm>{Algorithm::kXy});
  EXPECT_EQ(x.out_dir, "out");
}

TEST(Config, ValuesCommentsAndLists) {
  ExperimentConfig x = parse_config(kMesh3 +
                                    "# comment\n"
                                    "switching = saf   # trailing\n"
                                    "buffer_depth = 8\n"
                                    "traffic.rate = 0.25\n"
                                    "sweep.rates = 0.1, 0.2\n"
                                    "sweep.seeds = 4,5,6\n"
                                    "sweep.algorithms = xy, neighborhood\n"
                                    "wireless.enabled = 1\n"
                                    "wireless.hubs = 0, 8\n");
  EXPECT_EQ(x.sim.fabric.switching, Switching::kStoreAndForward);
  EXPECT_EQ(x.sim.fabric.buffer_depth, 8);
  EXPECT_DOUBLE_EQ(x.sim.traffic.injection_rate, 0.25);
  EXPECT_EQ(x.rates, (std::vector<double>{0.1, 0.2}));
  EXPECT_EQ(x.seeds, (std::vector<std::uint64_t>{4, 5, 6}));
  EXPECT_EQ(x.algorithms, (std::vector<Algorithm>{Algorithm::kXy, Algorithm::kNeighborhood}));
  EXPECT_TRUE(x.sim.wireless.enabled);
  EXPECT_EQ(x.sim.wireless.hubs, (std::vector<NodeId>{0, 8}));
}

TEST(Config, KeysAreSorted) {
  auto keys = config_keys();
  EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
  EXPECT_NE(std::find(keys.begin(), keys.end(), "topology.kind"), keys.end());
}

TEST(Config, Errors) {
  EXPECT_NOC_ERROR(kUnknownKey, parse_config(kMesh3 + "routing.colour = red\n"));
  EXPECT_NOC_ERROR(kSyntaxError, parse_config(kMesh3 + "buffer_depth 4\n"));
  EXPECT_NOC_ERROR(kSyntaxError, parse_config(kMesh3 + "seed = 1\nseed = 2\n"));
  EXPECT_NOC_ERROR(kTypeMismatch, parse_config(kMesh3 + "buffer_depth = four\n"));
  EXPECT_NOC_ERROR(kTypeMismatch, parse_config(kMesh3 + "wireless.enabled = maybe\n"));
  EXPECT_NOC_ERROR(kMissingRequired, parse_config("routing.algorithm = xy\n"));
  EXPECT_NOC_ERROR(kMissingRequired, parse_config("topology.kind = mesh\ntopology.width = 2\ntopology.height = 2\n"));
  EXPECT_NOC_ERROR(kConfigError,
                   parse_config("topology.kind = circulant\ntopology.nodes = 8\ntopology.generators = 1,2\n"
                                "routing.algorithm = xy\n"));
  EXPECT_NOC_ERROR(kConfigError, parse_config("topology.kind = torus\ntopology.width = 3\ntopology.height = 3\n"
                                              "routing.algorithm = xy\nsweep.algorithms = neighborhood, dyxy\n"));
}

TEST(Config, ErrorsCarryPosition) {
  try {
    parse_config(kMesh3 + "\nbuffer_depth = x\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTypeMismatch);
    EXPECT_NE(std::string(e.what()).find("line 6:16"), std::string::npos) << e.what();
  }
}

TEST(Config, FilesResolveAgainstConfigDirectory) {
  fs::path dir = scratch_dir("resolve");
  write_file(dir, "f.txt", "link 0 1 10 20\n");
  write_file(dir, "a.cfg", kMesh3 + "faults.file = f.txt\n");
  ExperimentConfig x = load_config(dir / "a.cfg");
  ASSERT_EQ(x.sim.faults.events.size(), 1u);
  EXPECT_EQ(x.sim.faults.events[0].down, 10);
  fs::remove_all(dir);
}

// ---- sweeps -----------------------------------------------------------------

const std::string kSmallSweep = kMesh3 +
                                "sim.warmup = 100\nsim.measure = 600\nsim.drain = 2000\n"
                                "sweep.rates = 0, 0.1, 0.2\nsweep.seeds = 1, 2\n";

TEST(Sweep, OneRowPerPoint) {
  auto rows = run_sweep_rows(parse_config(kSmallSweep), 1);
  ASSERT_EQ(rows.size(), 6u);
  std::istringstream csv(sweep_csv(rows));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, kSweepHeader);
  int n = 0;
  while (std::getline(csv, line)) ++n;
  EXPECT_EQ(n, 6);
  for (const auto& r : rows)
    if (r.rate == 0.0) {
      EXPECT_EQ(r.report.delivered, 0u);
      EXPECT_EQ(r.report.throughput, 0.0);
    }
}

TEST(Sweep, IndependentOfThreadCount) {
  ExperimentConfig x = parse_config(kSmallSweep);
  const std::string one = sweep_csv(run_sweep_rows(x, 1));
  EXPECT_EQ(sweep_csv(run_sweep_rows(x, 3)), one);
}

TEST(Sweep, RerunIsByteIdentical) {
  fs::path dir = scratch_dir("rerun");
  fs::path cfg = write_file(dir, "s.cfg", kSmallSweep);
  ASSERT_EQ(cli("sweep --config " + cfg.string() + " --out " + (dir / "a").string()).exit_code, 0);
  ASSERT_EQ(cli("sweep --config " + cfg.string() + " --out " + (dir / "b").string() + " --threads 2").exit_code, 0);
  for (const char* f : {"sweep.csv", "summary.csv"}) EXPECT_EQ(read_file(dir / "a" / f), read_file(dir / "b" / f)) << f;
  fs::remove_all(dir);
}

class Golden : public ::testing::TestWithParam<const char*> {};

TEST_P(Golden, MatchesPinnedOutput) {
  const std::string name = GetParam();
  fs::path out = scratch_dir("golden_" + name);
  const fs::path golden = kData / "golden";
  Invocation r = cli("sweep --config " + (golden / (name + ".cfg")).string() + " --out " + out.string());
  ASSERT_EQ(r.exit_code, 0);
  for (const char* f : {"sweep.csv", "summary.csv"})
    EXPECT_EQ(read_file(out / f), read_file(golden / name / f)) << name << "/" << f;
  fs::remove_all(out);
}

INSTANTIATE_TEST_SUITE_P(Configs, Golden, ::testing::Values("mesh_xy", "torus_xy", "faults_mesh", "wireless_mesh"));

// ---- subcommands ------------------------------------------------------------

TEST(Cli, RunPrintsReport) {
  fs::path dir = scratch_dir("run");
  fs::path cfg = write_file(dir, "r.cfg", kMesh3 + "traffic.rate = 0.1\nsim.warmup = 100\nsim.measure = 500\n");
  Invocation r = cli("run --config " + cfg.string());
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out.rfind("delivered=", 0), 0u) << r.out;
  EXPECT_NE(r.out.find("\ndeadlock=0\n"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, CheckDeadlock) {
  fs::path dir = scratch_dir("check");
  fs::path mesh = write_file(dir, "m.cfg", kMesh3);
  fs::path torus = write_file(dir, "t.cfg",
                              "topology.kind = torus\ntopology.width = 4\ntopology.height = 4\nrouting.algorithm = xy\n");
  Invocation a = cli("check-deadlock --config " + mesh.string());
  EXPECT_EQ(a.exit_code, 0);
  EXPECT_EQ(a.out, "deadlock-free: true\n");
  Invocation b = cli("check-deadlock --config " + torus.string() + " --vc 1");
  EXPECT_EQ(b.exit_code, 0);
  EXPECT_EQ(b.out, "deadlock-free: false\n");
  Invocation c = cli("check-deadlock --config " + torus.string());
  EXPECT_EQ(c.out, "deadlock-free: true\n");
  Invocation d = cli("check-deadlock --config " + mesh.string() + " --algorithm dyxy --vc 2");
  EXPECT_EQ(d.out, "deadlock-free: true\n");
  fs::remove_all(dir);
}

TEST(Cli, RoutesListsEveryShortestPath) {
  fs::path dir = scratch_dir("routes");
  fs::path cfg = write_file(dir, "m.cfg", kMesh3);
  Invocation r = cli("routes --config " + cfg.string() + " --src 0 --dst 8");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 6);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "0 1 2 5 8");
  fs::remove_all(dir);
}

TEST(Cli, SynthAndScore) {
  fs::path dir = scratch_dir("synth");
  Invocation s = cli("synth --nodes 4 --degree 3 --diameter 1");
  ASSERT_EQ(s.exit_code, 0);
  fs::path topo = write_file(dir, "k4.txt", s.out);
  Invocation sc = cli("score --topology " + topo.string());
  EXPECT_EQ(sc.exit_code, 0);
  EXPECT_NE(sc.out.find("diameter=1\n"), std::string::npos) << sc.out;
  EXPECT_NE(sc.out.find("edge_count=6\n"), std::string::npos) << sc.out;
  EXPECT_EQ(cli("synth --nodes 10 --degree 2 --diameter 2").exit_code, 1);
  fs::remove_all(dir);
}

TEST(Cli, ExitCodes) {
  fs::path dir = scratch_dir("exit");
  fs::path bad = write_file(dir, "bad.cfg", kMesh3 + "bogus.key = 1\n");
  EXPECT_EQ(cli("run --config " + bad.string()).exit_code, 1);
  EXPECT_EQ(cli("run --config " + (dir / "missing.cfg").string()).exit_code, 1);
  EXPECT_EQ(cli("frobnicate").exit_code, 1);
  fs::path dl = write_file(dir, "dl.cfg",
                           "topology.kind = torus\ntopology.width = 6\ntopology.height = 6\nrouting.algorithm = xy\n"
                           "vc_count = 1\nbuffer_depth = 2\ntraffic.rate = 0.3\nsim.warmup = 200\n"
                           "sim.measure = 1500\nsim.drain = 3000\n");
  EXPECT_EQ(cli("run --config " + dl.string()).exit_code, 2);
  fs::remove_all(dir);
}

}  // namespace
}  // namespace noc
