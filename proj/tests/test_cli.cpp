#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

namespace {

struct CliResult {
    int status = -1;
    std::string out;
};

CliResult run(const std::string& args) {
    const std::string cmd = std::string(SPIKED_CLI_PATH) + " " + args + " 2>&1";
    CliResult r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
    const int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

std::filesystem::path write_temp(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST(Cli, FisherSech) {
    const CliResult r = run("fisher --noise sech");
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("F_g=1.233700550"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("G_H=0.616850275"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("w4_tilde=1.500000000"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("F_gd="), std::string::npos) << r.out;
}

TEST(Cli, HelpListsFlags) {
    const CliResult r = run("simulate --help");
    EXPECT_EQ(r.status, 0);
    for (const char* flag : {"--config", "--out", "--seed", "--threads"})
        EXPECT_NE(r.out.find(flag), std::string::npos) << flag;
    const CliResult t = run("test --help");
    for (const char* flag : {"--model", "--noise", "--snr", "--k1", "--k2", "--transformed", "--seed"})
        EXPECT_NE(t.out.find(flag), std::string::npos) << flag;
    EXPECT_NE(run("rank --help").out.find("--kmax"), std::string::npos);
}

TEST(Cli, UnknownFlag) {
    const CliResult r = run("fisher --bogus");
    EXPECT_EQ(r.status, 1);
    EXPECT_EQ(run("").status, 1);
}

TEST(Cli, MalformedConfigNamesKey) {
    const auto path = write_temp("spiked_cli_bad.json",
                                 R"({"experiment": "clt_null", "model": "wigner", "N": 16, "noise": "gaussian",
                                     "snr": [0.5], "trials": 2, "colour": 3})");
    const CliResult r = run("simulate --config " + path.string());
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.out.find("colour"), std::string::npos) << r.out;
    std::filesystem::remove(path);
}

TEST(Cli, SupercriticalTestExitsTwo) {
    const CliResult r = run("test --model wigner --noise gaussian --snr 0.5 --true-k 1 --true-snr 9 --N 128 --seed 3");
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.out.find("eigenvalue"), std::string::npos) << r.out;
}

TEST(Cli, DomainValidation) {
    EXPECT_EQ(run("test --snr 1.5").status, 1);
    EXPECT_EQ(run("test --model multiplicative --transformed --snr 0.1 --N 64").status, 1);
}

TEST(Cli, TestAndRank) {
    const CliResult t = run("test --model additive --noise sech --snr 0.3 --k1 0 --k2 1 --N 128 --d0 0.5 --transformed");
    EXPECT_EQ(t.status, 0) << t.out;
    for (const char* key : {"statistic=", "threshold=", "decision=k", "theory_error="})
        EXPECT_NE(t.out.find(key), std::string::npos) << key;
    const CliResult r = run("rank --snr 0.4 --kmax 4 --true-k 2 --N 128");
    EXPECT_EQ(r.status, 0) << r.out;
    EXPECT_NE(r.out.find("kappa="), std::string::npos);
}

TEST(Cli, Spectrum) {
    const CliResult r = run("spectrum --model wigner --N 40 --snr 9 --seed 2");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out.rfind("index,value\n", 0), 0u);
    EXPECT_NE(r.out.find("outliers,1"), std::string::npos) << r.out;
}

TEST(Cli, CltCheck) {
    const CliResult r = run("clt-check --noise sech --omega 0.3");
    EXPECT_EQ(r.status, 0);
    EXPECT_EQ(r.out.rfind("case,omega,m0,m1,V0,series_m,series_V\n", 0), 0u);
    EXPECT_NE(r.out.find("rect_transformed,0.3,"), std::string::npos);
}

TEST(Cli, SimulateDeterministic) {
    const auto cfg = write_temp("spiked_cli_sim.json",
                                R"({"experiment": "weak_detection", "model": "wigner", "N": 24,
                                    "noise": {"kind": "gaussian", "w2": 2}, "snr": [0.4], "k1": 1, "k2": 2,
                                    "trials": 16, "seed": 5})");
    const auto dir = std::filesystem::temp_directory_path();
    const auto a = dir / "spiked_cli_a.csv", b = dir / "spiked_cli_b.csv";
    EXPECT_EQ(run("simulate --config " + cfg.string() + " --out " + a.string() + " --threads 1").status, 0);
    EXPECT_EQ(run("simulate --config " + cfg.string() + " --out " + b.string() + " --threads 3").status, 0);
    std::ifstream fa(a), fb(b);
    const std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
    EXPECT_FALSE(sa.empty());
    EXPECT_EQ(sa, sb);
    const CliResult seeded = run("simulate --config " + cfg.string() + " --seed 6");
    EXPECT_NE(seeded.out.find(",6\n"), std::string::npos) << seeded.out;
    for (const auto& p : {cfg, a, b}) std::filesystem::remove(p);
}

TEST(Cli, PresetsParse) {
    // Every shipped preset must load; running them is left to the user.
    for (const auto& entry : std::filesystem::directory_iterator(SPIKED_PRESET_DIR)) {
        if (entry.path().extension() != ".json") continue;
        const auto out = std::filesystem::temp_directory_path() / "spiked_preset_probe.json";
        // Shrink trials so the check stays fast.
        std::ifstream in(entry.path());
        std::string text((std::istreambuf_iterator<char>(in)), {});
        const auto pos = text.find("\"trials\"");
        ASSERT_NE(pos, std::string::npos) << entry.path();
        const auto colon = text.find(':', pos), end = text.find_first_of(",}", colon);
        text.replace(colon + 1, end - colon - 1, " 1");
        std::ofstream(out) << text;
        const CliResult r = run("simulate --config " + out.string());
        EXPECT_EQ(r.status, 0) << entry.path() << "\n" << r.out;
        std::filesystem::remove(out);
    }
}
