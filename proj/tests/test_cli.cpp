#include <gtest/gtest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

struct Result {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("consensus-lab-cli-" + std::to_string(::getpid()) + "-" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  Result run(const std::string& args) {
    const fs::path out = dir_ / "stdout", err = dir_ / "stderr";
    const std::string cmd = std::string(CONSENSUS_LAB_CLI) + " " + args + " >" + out.string() +
                            " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
  }

  std::string data(const std::string& name) { return std::string(CONSENSUS_LAB_DATA) + "/" + name; }

  fs::path dir_;
};

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST_F(Cli, TuneBundledHexagon) {
  const Result r = run("tune " + data("c6.graph"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(first_line(r.out), "case_id,omega_star,omega_bar,rho_star,gamma_star,tau_star,alpha_gd,tau_gd");
  EXPECT_NE(r.out.find("1.7321,1.4641,0.4641"), std::string::npos) << r.out;
}

TEST_F(Cli, SpectrumRow) {
  const Result r = run("spectrum --graph " + data("c4.graph") + " --digits 17");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(first_line(r.out),
            "n,m,omega_star,omega_bar,omega_hat,omega_hat_delta,omega_n,omega_L,lambda1_L");
  std::istringstream row(r.out.substr(r.out.find('\n') + 1));
  std::vector<double> v;
  for (std::string f; std::getline(row, f, ',');) v.push_back(std::stod(f));
  const std::vector<double> want{4, 4, 0, 0, -1, 2, 0.5, 2, 4};
  ASSERT_EQ(v.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(v[i], want[i], 1e-12) << i;
}

TEST_F(Cli, SimulateHeaderOnEveryBundledGraph) {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(CONSENSUS_LAB_DATA)) {
    if (entry.path().extension() != ".graph") continue;
    ++seen;
    const Result r = run("simulate --alg gd --max-iters 20 --graph " + entry.path().string());
    ASSERT_EQ(r.code, 0) << entry.path() << r.err;
    EXPECT_EQ(first_line(r.out), "t,error,objective") << entry.path();
  }
  EXPECT_GE(seen, 5);
}

TEST_F(Cli, DuplicateEdgeNamesLine) {
  std::ofstream(dir_ / "dup.graph") << "4 4\n0 1\n1 2\n2 3\n1 0\n";
  const Result r = run("tune " + (dir_ / "dup.graph").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 5"), std::string::npos) << r.err;
  EXPECT_EQ(r.err.find('\n'), r.err.size() - 1);  // one line
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("simulate --no-such-flag").code, 1);
  EXPECT_EQ(run("simulate --alg newton").code, 2);
  EXPECT_EQ(run("tune /nonexistent/file.graph").code, 4);
  EXPECT_EQ(run("simulate --alg pdmm --rho auto").code, 2);
  const Result div = run("simulate --alg gd --alpha 5 --max-iters 5000 --n 6");
  EXPECT_EQ(div.code, 3);
  EXPECT_NE(div.err.find("round"), std::string::npos);
}

TEST_F(Cli, ConfigFileAndOverride) {
  std::ofstream(dir_ / "run.cfg") << "# short run\nalg = gd\nalpha = 0.1\nmax-iters = 7\nn = 5\n";
  const Result a = run("simulate --config " + (dir_ / "run.cfg").string());
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(std::count(a.out.begin(), a.out.end(), '\n'), 9);  // header + rounds 0..7
  const Result b = run("simulate --config " + (dir_ / "run.cfg").string() + " --max-iters 3");
  EXPECT_EQ(std::count(b.out.begin(), b.out.end(), '\n'), 5);
  std::ofstream(dir_ / "bad.cfg") << "alg = gd\nwarp = 9\n";
  const Result c = run("simulate --config " + (dir_ / "bad.cfg").string());
  EXPECT_EQ(c.code, 2);
  EXPECT_NE(c.err.find("line 2"), std::string::npos);
}

TEST_F(Cli, RateOfSimulatedTrace) {
  const fs::path trace = dir_ / "gd.csv";
  ASSERT_EQ(run("simulate --alg gd --alpha 0.25 --graph " + data("c4.graph") +
                " --max-iters 35 --tol 0 --out " + trace.string())
                .code,
            0);
  const Result r = run("rate " + trace.string() + " --digits 6");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(first_line(r.out), "tau_hat,window_start,window_end,residual");
  EXPECT_NEAR(std::stod(r.out.substr(r.out.find('\n') + 1)), 0.5, 1e-5);
}

TEST_F(Cli, LiftCheck) {
  const Result r = run("lift-check " + data("c4.graph") + " --rho 1 --gamma 1 --beta 0.125");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(first_line(r.out), "projection,flow,stationarity_G,stationarity_A,min_entry_A");
}

TEST_F(Cli, GraphGenRoundTrip) {
  const Result r = run("graph gen --family grid --rows 2 --cols 3");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(first_line(r.out), "6 7");
}

TEST_F(Cli, CompareIsByteReproducible) {
  const std::string args =
      "compare --family ring --n 8 --delta 0.01 --anchor random --max-iters 300 --tol 1e-6 "
      "--algs gd,admm,pdmm --grid-budget 12 --seed 4 --out-dir ";
  const Result a = run(args + (dir_ / "a").string() + " --svg " + (dir_ / "a.svg").string());
  const Result b = run(args + (dir_ / "b").string());
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  int files = 0;
  for (const auto& e : fs::directory_iterator(dir_ / "a")) {
    ++files;
    EXPECT_EQ(slurp(e.path()), slurp(dir_ / "b" / e.path().filename())) << e.path();
  }
  EXPECT_EQ(files, 4);
  const std::string summary = slurp(first_line(a.out));
  EXPECT_EQ(first_line(summary).rfind("config_hash,seed,algorithm", 0), 0u);
  const std::string hash = fs::path(first_line(a.out)).stem().string().substr(8);
  EXPECT_NE(summary.find("\n" + hash + ",4,gd,"), std::string::npos) << summary;
  EXPECT_TRUE(fs::exists(dir_ / "a.svg"));
}

TEST_F(Cli, ScalingEmbedsHashAndSeed) {
  const Result r = run("scaling --algs gd --sizes 6,8,10 --tuning default --tol 1e-6 "
                       "--max-iters 5000 --out-dir " + dir_.string());
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string fit = slurp(first_line(r.out));
  EXPECT_EQ(first_line(fit), "config_hash,seed,algorithm,slope,intercept,residual,points");
  EXPECT_NE(fit.find(",1,gd,"), std::string::npos);
}
