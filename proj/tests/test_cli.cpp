#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "rydopt/config.hpp"
#include "../tools/cli.hpp"

using namespace rydopt;
namespace fs = std::filesystem;

namespace {
std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
};
} // namespace

TEST_CASE("config round trip preserves the normalized config") {
    ExperimentConfig cfg;
    cfg.tau_fs = 123.5;
    cfg.sweep_alphas = {0.0, 0.1, 0.25};
    cfg.noise_kind = "ou";
    cfg.tau_c_fs = 37.5;
    cfg.master_seed = 999;
    const std::string text = serialize_config(cfg);
    const ExperimentConfig back = parse_config_text(text);
    CHECK(back.tau_fs == cfg.tau_fs);
    CHECK(back.sweep_alphas == cfg.sweep_alphas);
    CHECK(back.master_seed == cfg.master_seed);
    CHECK(back.tau_au() == cfg.tau_au());
    CHECK(serialize_config(back) == text);
}

TEST_CASE("unknown keys and sections are rejected") {
    CHECK_THROWS_AS(parse_config_text("frobnicate = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[system]\nmass = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[made_up]\nx = 1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[grid]\nn_steps = banana\n"), ConfigError);
}

TEST_CASE("comments and blank lines are tolerated") {
    const auto cfg = parse_config_text(
        "# a comment\nmaster_seed = 7\n\n[grid]\ntau_fs = 99 # trailing\n");
    CHECK(cfg.master_seed == 7);
    CHECK(cfg.tau_fs == 99.0);
}

TEST_CASE("RYDOPT_SEED overrides the file but not the flag") {
    TempDir dir("rydopt_cli_seed");
    const auto cfg_path = dir.path / "exp.cfg";
    {
        std::ofstream out(cfg_path);
        out << "master_seed = 1\n[grid]\ntau_fs = 100\nn_steps = 1200\n";
    }
    setenv("RYDOPT_SEED", "22", 1);
    const auto out_env = dir.path / "env";
    CHECK(cli::run({"noise-gen", "--config", cfg_path.string(), "--n-realizations", "4",
                    "--output-dir", out_env.string()}) == 0);
    setenv("RYDOPT_SEED", "22", 1);
    const auto out_flag = dir.path / "flag";
    CHECK(cli::run({"noise-gen", "--config", cfg_path.string(), "--n-realizations", "4",
                    "--seed", "22", "--output-dir", out_flag.string()}) == 0);
    unsetenv("RYDOPT_SEED");
    // same effective seed by both routes -> identical artifacts
    CHECK(slurp(out_env / "noise_realization.csv") ==
          slurp(out_flag / "noise_realization.csv"));
}

TEST_CASE("simulate writes deterministic artifacts and exit code 0") {
    TempDir dir("rydopt_cli_sim");
    auto run_once = [&](const std::string& sub) {
        const auto out = dir.path / sub;
        const int rc = cli::run({"simulate", "--tau-fs", "100", "--n-steps", "2000",
                                 "--model", "3ln", "--kind", "white", "--channel",
                                 "amplitude", "--alpha", "0.2", "--seed", "5",
                                 "--output-dir", out.string()});
        REQUIRE(rc == 0);
        return slurp(out / "history.csv") + slurp(out / "final.json");
    };
    CHECK(run_once("a") == run_once("b"));
}

TEST_CASE("simulate with 2la leaves the excited state empty") {
    TempDir dir("rydopt_cli_2la");
    REQUIRE(cli::run({"simulate", "--tau-fs", "100", "--n-steps", "1500", "--model",
                      "2la", "--output-dir", dir.str()}) == 0);
    std::ifstream in(dir.path / "history.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "t_fs,p_g,p_s,p_e");
    while (std::getline(in, line)) {
        const auto pos = line.find_last_of(',');
        CHECK(line.substr(pos + 1) == "0");
    }
}

TEST_CASE("sweep with alpha zero writes a zero-spread row") {
    TempDir dir("rydopt_cli_sweep");
    REQUIRE(cli::run({"sweep", "--taus-fs", "100", "--alphas", "0", "--n-steps", "1500",
                      "--n-realizations", "4", "--output-dir", dir.str()}) == 0);
    std::ifstream in(dir.path / "sweep.csv");
    std::string header, row;
    std::getline(in, header);
    CHECK(header ==
          "tau_fs,dw_over_vdd,noise_kind,channel,alpha,model,mean_F,std_F,n,seed,wall_ms");
    std::getline(in, row);
    // std_F column is the 8th field
    std::stringstream ss(row);
    std::string tok;
    for (int i = 0; i < 8; ++i) std::getline(ss, tok, ',');
    CHECK(tok == "0");
}

TEST_CASE("unknown reproduce id lists the valid ones") {
    CHECK(cli::run({"reproduce", "fig99"}) == 2);
}

TEST_CASE("bad config values exit with code 2") {
    TempDir dir("rydopt_cli_bad");
    const auto cfg_path = dir.path / "bad.cfg";
    {
        std::ofstream out(cfg_path);
        out << "[noise]\nkind = turquoise\n";
    }
    CHECK(cli::run({"simulate", "--config", cfg_path.string()}) == 2);
}

TEST_CASE("unwritable output directory exits with code 4") {
    CHECK(cli::run({"simulate", "--tau-fs", "100", "--n-steps", "1500",
                    "--output-dir", "/proc/definitely/not/writable"}) == 4);
}

TEST_CASE("noise-gen emits the documented csv headers and a slope line") {
    TempDir dir("rydopt_cli_ng");
    REQUIRE(cli::run({"noise-gen", "--kind", "pink", "--tau-fs", "100", "--n-steps",
                      "4096", "--n-realizations", "8", "--seed", "3",
                      "--output-dir", dir.str()}) == 0);
    std::ifstream r(dir.path / "noise_realization.csv");
    std::string line;
    std::getline(r, line);
    CHECK(line == "t_fs,sample");
    std::ifstream p(dir.path / "noise_psd.csv");
    std::getline(p, line);
    CHECK(line == "freq_au,psd");
}

TEST_CASE("optimize --resume is a no-op on a finished run") {
    TempDir dir("rydopt_cli_resume");
    // a modest target reached in a couple of iterations
    REQUIRE(cli::run({"optimize", "--tau-fs", "100", "--n-steps", "2000",
                      "--target-fidelity", "0.45", "--max-iters", "50",
                      "--output-dir", dir.str()}) == 0);
    const auto before = slurp(dir.path / "optimize.json");
    CHECK(cli::run({"optimize", "--tau-fs", "100", "--n-steps", "2000",
                    "--target-fidelity", "0.45", "--max-iters", "50", "--resume",
                    "--output-dir", dir.str()}) == 0);
    CHECK(slurp(dir.path / "optimize.json") == before);
}
