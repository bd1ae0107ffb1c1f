#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>

#include <json.hpp>

#include "test_support.hpp"

namespace {

namespace fs = std::filesystem;

struct RunResult {
    int exit_code;
    std::string output;
};

/// Runs the CLI binary with stderr folded into stdout.
RunResult run_cli(const std::string& args) {
    std::string cmd = std::string(HECOMP_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    std::string output;
    char buf[4096];
    while (std::size_t n = fread(buf, 1, sizeof(buf), pipe)) output.append(buf, n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, output};
}

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() / ("hecomp_cli_" + std::to_string(::getpid()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
};

TEST_F(CliTest, UnknownFlagIsUsageError) {
    auto r = run_cli("keygen --scheme lwe --set lwe-toy --frobnicate --out " + path("k.bin"));
    EXPECT_EQ(r.exit_code, 2);
}

TEST_F(CliTest, MissingSubcommandIsUsageError) {
    auto r = run_cli("");
    EXPECT_EQ(r.exit_code, 2);
}

TEST_F(CliTest, EncryptDecryptRoundTrip) {
    ASSERT_EQ(run_cli("--seed 1 keygen --scheme lwe --set lwe-toy --out " + path("sk.bin")).exit_code, 0);
    ASSERT_EQ(run_cli("--seed 2 encrypt --sk " + path("sk.bin") + " --mu 1 --out " + path("ct.bin")).exit_code, 0);
    auto r = run_cli("decrypt --in " + path("ct.bin") + " --sk " + path("sk.bin"));
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.output, "1\n");
}

TEST_F(CliTest, SeededEncryptionRoundTrip) {
    ASSERT_EQ(run_cli("--seed 3 keygen --scheme rlwe --set rlwe-toy --out " + path("sk.bin")).exit_code, 0);
    ASSERT_EQ(run_cli("--seed 4 encrypt --sk " + path("sk.bin") + " --mu 1,2,3 --seeded --out " +
                      path("ct.bin")).exit_code, 0);
    auto r = run_cli("decrypt --in " + path("ct.bin") + " --sk " + path("sk.bin"));
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.output, "1,2,3,0,0,0,0,0\n");
}

TEST_F(CliTest, MessageOutOfRangeFails) {
    ASSERT_EQ(run_cli("--seed 5 keygen --scheme lwe --set lwe-toy --out " + path("sk.bin")).exit_code, 0);
    auto r = run_cli("encrypt --sk " + path("sk.bin") + " --mu 4 --out " + path("ct.bin"));
    EXPECT_EQ(r.exit_code, 1);
    EXPECT_NE(r.output.find("error"), std::string::npos);
}

TEST_F(CliTest, FullPipelineMatchesClearOracle) {
    // keygen -> enc-key -> encrypt x3 -> process(weights) -> compress ->
    // decrypt, against the clear weighted sum mod p.
    ASSERT_EQ(run_cli("--seed 6 keygen --scheme lwe --set lwe-toy --out " + path("sk.bin")).exit_code, 0);
    ASSERT_EQ(run_cli("--seed 7 keygen --scheme ahe --ahe-bits 64 --out " + path("akp.bin") +
                      " --pub-out " + path("apk.bin")).exit_code, 0);
    ASSERT_EQ(run_cli("--seed 8 enc-key --sk " + path("sk.bin") + " --ahe " + path("apk.bin") +
                      " --out " + path("esk.bin")).exit_code, 0);
    const int mus[3] = {1, 2, 3};
    const int weights[3] = {3, 1, 2};
    for (int i = 0; i < 3; ++i) {
        ASSERT_EQ(run_cli("--seed " + std::to_string(10 + i) + " encrypt --sk " + path("sk.bin") +
                          " --mu " + std::to_string(mus[i]) + " --out " +
                          path("ct" + std::to_string(i) + ".bin")).exit_code, 0);
    }
    ASSERT_EQ(run_cli("process --in " + path("ct0.bin") + " --in " + path("ct1.bin") + " --in " +
                      path("ct2.bin") + " --weights 3,1,2 --out " + path("sum.bin")).exit_code, 0);
    ASSERT_EQ(run_cli("compress --esk " + path("esk.bin") + " --in " + path("sum.bin") +
                      " --out " + path("comp.bin")).exit_code, 0);
    auto direct = run_cli("decrypt --in " + path("sum.bin") + " --sk " + path("sk.bin"));
    auto modified = run_cli("decrypt --in " + path("comp.bin") + " --ahe " + path("akp.bin"));
    ASSERT_EQ(direct.exit_code, 0);
    ASSERT_EQ(modified.exit_code, 0);
    EXPECT_EQ(direct.output, modified.output);
    int expected = 0;
    for (int i = 0; i < 3; ++i) expected = (expected + mus[i] * weights[i]) % 4;
    EXPECT_EQ(modified.output, std::to_string(expected) + "\n");
}

TEST_F(CliTest, RlweCompressCoefficient) {
    ASSERT_EQ(run_cli("--seed 20 keygen --scheme rlwe --set rlwe-toy --out " + path("sk.bin")).exit_code, 0);
    ASSERT_EQ(run_cli("--seed 21 keygen --scheme ahe --ahe-bits 128 --out " + path("akp.bin")).exit_code, 0);
    ASSERT_EQ(run_cli("--seed 22 enc-key --sk " + path("sk.bin") + " --ahe " + path("akp.bin") +
                      " --out " + path("esk.bin")).exit_code, 0);
    ASSERT_EQ(run_cli("--seed 23 encrypt --sk " + path("sk.bin") + " --mu 0,3,1 --out " +
                      path("ct.bin")).exit_code, 0);
    ASSERT_EQ(run_cli("compress --esk " + path("esk.bin") + " --in " + path("ct.bin") +
                      " --k 1 --out " + path("comp.bin")).exit_code, 0);
    auto r = run_cli("decrypt --in " + path("comp.bin") + " --ahe " + path("akp.bin"));
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(r.output, "3\n");
}

TEST_F(CliTest, IncompatibleKeyExitsWithSetupError) {
    // A 64-bit additive key cannot cover q + n q^2 for n630 (q = 2^64).
    ASSERT_EQ(run_cli("--seed 30 keygen --scheme lwe --set n630 --out " + path("sk.bin")).exit_code, 0);
    ASSERT_EQ(run_cli("--seed 31 keygen --scheme ahe --ahe-bits 64 --out " + path("akp.bin")).exit_code, 0);
    auto r = run_cli("enc-key --sk " + path("sk.bin") + " --ahe " + path("akp.bin") + " --out " +
                     path("esk.bin"));
    EXPECT_EQ(r.exit_code, 3);
}

TEST_F(CliTest, BenchSizesMachineFormat) {
    auto r = run_cli("bench --sets table1 --ahe-bits 3072 --sizes-only --format machine");
    ASSERT_EQ(r.exit_code, 0);
    auto doc = nlohmann::json::parse(r.output);
    ASSERT_EQ(doc["entries"].size(), 2u);
    EXPECT_EQ(doc["entries"][0]["encrypted_key_bytes"], 483840);
    EXPECT_EQ(doc["entries"][1]["encrypted_key_bytes"], 576000);
    EXPECT_EQ(doc["entries"][0]["compressed_ct_bytes"], 768);
}

TEST_F(CliTest, BenchTextFormat) {
    auto r = run_cli("bench --sets N1024 --ahe-bits 3072 --sizes-only");
    ASSERT_EQ(r.exit_code, 0);
    EXPECT_NE(r.output.find("786432"), std::string::npos);
    EXPECT_NE(r.output.find("size convention differs"), std::string::npos);
}

TEST_F(CliTest, ServeAndRequestLoopback) {
    // Start a one-session server on an ephemeral port, scrape the port from
    // its stdout, then run a full client request against it.
    std::string port_file = path("port.txt");
    std::string server_cmd = std::string(HECOMP_CLI_PATH) +
                             " serve --bind 127.0.0.1:0 --once > " + port_file + " 2>&1 &";
    ASSERT_EQ(std::system(server_cmd.c_str()), 0);

    std::string port;
    for (int attempt = 0; attempt < 100 && port.empty(); ++attempt) {
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        std::ifstream in(port_file);
        std::string line;
        if (std::getline(in, line)) {
            auto colon = line.rfind(':');
            if (colon != std::string::npos) port = line.substr(colon + 1);
        }
    }
    ASSERT_FALSE(port.empty()) << "server did not announce its port";

    auto r = run_cli("--seed 40 request --connect 127.0.0.1:" + port +
                     " --set lwe-toy --ahe-bits 64 --inputs 1,2,3 --weights 2,3,1");
    ASSERT_EQ(r.exit_code, 0) << r.output;
    // 2*1 + 3*2 + 1*3 = 11 = 3 mod 4.
    EXPECT_NE(r.output.find("result: 3"), std::string::npos) << r.output;
    EXPECT_NE(r.output.find("expected (clear evaluation): 3"), std::string::npos);
}

}  // namespace
