#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace {

namespace fs = std::filesystem;

struct Result {
    int code;
    std::string out, err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("rotsense_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    Result run(const std::string& args, const std::string& env = "") const {
        const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
        const std::string cmd = env + " '" + std::string(ROTSENSE_CLI_PATH) + "' " + args + " >'" + out.string() +
                                "' 2>'" + err.string() + "'";
        const int status = std::system(cmd.c_str());
        return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
    }

    std::string prefix(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

TEST_F(Cli, UsageErrors) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("frobnicate").code, 2);
    const auto r = run("meanfield --set model.bogus=1 -o " + prefix("x"));
    EXPECT_EQ(r.code, 2);
    const auto j = nlohmann::json::parse(r.err);
    EXPECT_EQ(j["error"]["class"], "usage");
    EXPECT_NE(j["error"]["message"].get<std::string>().find("model.bogus"), std::string::npos);
    EXPECT_EQ(run("meanfield --set model.M=6").code, 2);
    EXPECT_EQ(run("meanfield --set novalue").code, 2);
    EXPECT_EQ(run("ensemble --n-traj 1").code, 2);
    EXPECT_EQ(run("meanfield -c /nonexistent.ini").code, 2);
    EXPECT_EQ(run("meanfield", "ROTSENSE_THREADS=zero").code, 2);
}

TEST_F(Cli, HelpAndVersion) {
    const auto r = run("--version");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("0.1.0"), std::string::npos);
    EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, RuntimeErrorExitCode) {
    std::ofstream(dir_ / "blocker") << "x";
    const auto r = run("meanfield -o " + (dir_ / "blocker" / "sub" / "out").string());
    EXPECT_EQ(r.code, 3);
    EXPECT_EQ(nlohmann::json::parse(r.err)["error"]["class"], "runtime");
}

TEST_F(Cli, MeanField) {
    std::ofstream(dir_ / "cfg.ini") << "[meanfield]\ntheta = 0\ng_rel = 0.5, 1.2\n";
    const auto r = run("-c " + (dir_ / "cfg.ini").string() + " meanfield -o " + prefix("mf"));
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string csv = slurp(prefix("mf") + "_meanfield.csv");
    EXPECT_NE(csv.find("# command = meanfield\n"), std::string::npos);
    EXPECT_NE(csv.find("theta_rad,g_rel,delta_opt,alpha_re,alpha_im,photon\n0,0.5,0,0,0,0\n"), std::string::npos);
    EXPECT_NE(csv.find("\n0,1.2,4317"), std::string::npos);
    EXPECT_NE(r.out.find("g0_crit = 0.0204124"), std::string::npos);
}

TEST_F(Cli, NoiselessTrajectory) {
    const auto r = run("trajectory --noiseless --t-end 1 -o " + prefix("tr"));
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string csv = slurp(prefix("tr") + "_trajectory.csv");
    EXPECT_NE(csv.find("# ensemble.noiseless = true\n"), std::string::npos);
    EXPECT_NE(csv.find("\nt_ms,theta_rad,g_rel,mean_photon,std_photon,mean_imbalance,std_imbalance,mean_atoms\n"),
              std::string::npos);
}

TEST_F(Cli, EnsembleJsonAndThreadInvariance) {
    const std::string common = "ensemble --n-traj 20 --t-end 0.5 --seed 4 --format json ";
    ASSERT_EQ(run(common + "--threads 1 -o " + prefix("a")).code, 0);
    ASSERT_EQ(run(common + "--threads 3 -o " + prefix("b")).code, 0);
    ASSERT_EQ(run(common + "-o " + prefix("c"), "ROTSENSE_THREADS=2").code, 0);
    const std::string a = slurp(prefix("a") + "_ensemble.json");
    EXPECT_EQ(a, slurp(prefix("b") + "_ensemble.json"));
    EXPECT_EQ(a, slurp(prefix("c") + "_ensemble.json"));
    const auto j = nlohmann::json::parse(a);
    EXPECT_EQ(j["metadata"]["n_traj"], 20);
    EXPECT_EQ(j["metadata"]["seed"], 4);
    EXPECT_EQ(j["t_ms"].size(), j["mean_photon"].size());
    EXPECT_EQ(j["t_ms"].size(), 51u);
}

TEST_F(Cli, SenseWritesSeriesAndSpectrum) {
    const auto r = run("sense --n-traj 3 --theta0 0.25 -o " + prefix("s"));
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string spec = slurp(prefix("s") + "_spectrum.csv");
    EXPECT_NE(spec.find("\nfreq_2pikHz,magnitude\n0,"), std::string::npos);
    EXPECT_NE(spec.find("# sense.theta0 = 0.25\n"), std::string::npos);
    EXPECT_TRUE(fs::exists(prefix("s") + "_timeseries.csv"));
    EXPECT_NE(r.out.find("dominant response"), std::string::npos);
}

TEST_F(Cli, SmallSweep) {
    const auto r = run("sweep --n-traj 2 --n-theta 2 --n-g 2 --t-end 2 --set sweep.tail=1 -o " + prefix("sw"));
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string pd = slurp(prefix("sw") + "_phase_diagram.csv");
    EXPECT_NE(pd.find("theta_rad,g_rel,photon_steady,is_sr,converged\n"), std::string::npos);
    const std::string b = slurp(prefix("sw") + "_boundary.csv");
    EXPECT_NE(b.find("theta_rad,g_rel_crit\n0,1\n1.45,"), std::string::npos);
}

} // namespace
