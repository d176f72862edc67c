#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "test_support.hpp"
#include "voskit/scene_gate.hpp"

using namespace voskit;
using namespace voskit::testing;

namespace {

int run_cli(const std::string& args, const std::string& env_prefix = "") {
    const std::string command = env_prefix + std::string(VOSKIT_CLI_PATH) + " " + args;
    const int status = std::system(command.c_str());
    REQUIRE(status != -1);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& file) {
    std::ifstream in(file);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("evaluate writes reports and exits 0 on a clean dataset") {
    TempDir dir("cli_eval");
    write_mini_dataset(dir.path() / "gt", dir.path() / "pred");
    const auto json_out = dir.path() / "report.json";
    const auto csv_out = dir.path() / "report.csv";

    const int code = run_cli("evaluate --gt " + (dir.path() / "gt").string() + " --pred " +
                             (dir.path() / "pred").string() + " --out-json " + json_out.string() +
                             " --out-csv " + csv_out.string() + " > /dev/null 2>&1");
    CHECK(code == 0);

    const std::string csv = slurp(csv_out);
    CHECK(csv.rfind("name,JF_dot,J,F_dot,JFd,JFr,F,JF\n", 0) == 0);
    CHECK(csv.find("overall,100.00,100.00,100.00,100.00,100.00,100.00,100.00") !=
          std::string::npos);
    const auto doc = nlohmann::json::parse(slurp(json_out));
    CHECK(doc["dataset"]["JF"] == 1.0);
}

TEST_CASE("usage errors exit 1 and data errors exit 2") {
    TempDir dir("cli_err");
    CHECK(run_cli("evaluate --pred somewhere > /dev/null 2>&1") == 1);  // --gt missing
    CHECK(run_cli("no-such-command > /dev/null 2>&1") == 1);
    CHECK(run_cli("evaluate --gt " + (dir.path() / "nope").string() + " --pred " +
                  (dir.path() / "nope").string() + " > /dev/null 2>&1") == 2);

    // invalid argument values reported by the library are usage errors
    write_mini_dataset(dir.path() / "gt", dir.path() / "pred");
    CHECK(run_cli("evaluate --gt " + (dir.path() / "gt").string() + " --pred " +
                  (dir.path() / "pred").string() + " --alpha -1 --out-json " +
                  (dir.path() / "r.json").string() + " --out-csv " +
                  (dir.path() / "r.csv").string() + " > /dev/null 2>&1") == 1);
}

TEST_CASE("gate, simulate, and attention-demo chain together") {
    TempDir dir("cli_chain");
    const auto frames = dir.path() / "frames";
    std::filesystem::create_directories(frames);
    for (int t = 0; t < 6; ++t) {
        RgbImage img{8, 8, std::vector<std::uint8_t>(8 * 8 * 3, 0)};
        for (std::size_t i = 0; i < 64; ++i) img.rgb[3 * i + (t >= 3 ? 2 : 0)] = 220;
        char name[16];
        std::snprintf(name, sizeof name, "%03d.png", t);
        write_color_image(frames / name, img);
    }

    const auto trace_file = dir.path() / "trace.json";
    CHECK(run_cli("gate --frames " + frames.string() + " --threshold 0.35 --bins 8,8,8 " +
                  "--anchor-mode previous --out " + trace_file.string() +
                  " > /dev/null 2>&1") == 0);
    const GateTrace trace = load_gate_trace(trace_file);
    CHECK(trace.frame_count() == 6);
    CHECK(trace.active(4));  // the color cut

    const auto mem_file = dir.path() / "memtrace.json";
    CHECK(run_cli("simulate --frames 6 --nl 4 --nc 2 --gate " + trace_file.string() + " --out " +
                  mem_file.string() + " > /dev/null 2>&1") == 0);
    const std::string jsonl = slurp(mem_file);
    int lines = 0;
    for (char c : jsonl) lines += c == '\n';
    CHECK(lines == 6);
    CHECK(jsonl.find("\"gate_active\":true") != std::string::npos);

    const auto demo_file = dir.path() / "demo.json";
    CHECK(run_cli("attention-demo --c 8 --hw 4 --nl 3 --seed 7 --out " + demo_file.string() +
                  " > /dev/null 2>&1") == 0);
    const auto demo = nlohmann::json::parse(slurp(demo_file));
    CHECK(demo["config"]["seed"] == 7);
    for (const auto& layer : demo["diagnostics"]["layers"]) {
        CHECK(std::abs(layer["self_row_sum_min"].get<double>() - 1.0) < 1e-6);
        CHECK(std::abs(layer["cross_row_sum_max"].get<double>() - 1.0) < 1e-6);
    }
    // fused = (grounding + concept) / 2 holds in the emitted tensors
    const auto& g = demo["outputs"]["grounding"][0][0][0];
    const auto& c = demo["outputs"]["concept"][0][0][0];
    const auto& f = demo["outputs"]["fused"][0][0][0];
    CHECK(std::abs((g.get<double>() + c.get<double>()) / 2 - f.get<double>()) < 1e-12);

    // simulate with a too-short gate trace is a usage error
    CHECK(run_cli("simulate --frames 10 --nl 4 --nc 2 --gate " + trace_file.string() +
                  " --out " + mem_file.string() + " > /dev/null 2>&1") == 1);
}

TEST_CASE("warnings reach the diagnostic stream and the env var sets workers") {
    TempDir dir("cli_warn");
    write_mini_dataset(dir.path() / "gt", dir.path() / "pred");
    std::filesystem::remove(dir.path() / "pred" / "video_a" / "00002.png");

    const auto err_file = dir.path() / "stderr.txt";
    const int code = run_cli("evaluate --gt " + (dir.path() / "gt").string() + " --pred " +
                             (dir.path() / "pred").string() + " --out-json " +
                             (dir.path() / "r.json").string() + " --out-csv " +
                             (dir.path() / "r.csv").string() + " > /dev/null 2> " +
                             err_file.string());
    CHECK(code == 0);
    const std::string err = slurp(err_file);
    CHECK(err.find("warning:") != std::string::npos);
    CHECK(err.find("00002.png") != std::string::npos);

    // worker count from the environment; output is identical either way
    const int env_code = run_cli("evaluate --gt " + (dir.path() / "gt").string() + " --pred " +
                                 (dir.path() / "pred").string() + " --out-json " +
                                 (dir.path() / "r2.json").string() + " --out-csv " +
                                 (dir.path() / "r2.csv").string() + " > /dev/null 2>&1",
                                 "VOSKIT_WORKERS=3 ");
    CHECK(env_code == 0);
    CHECK(slurp(dir.path() / "r2.json") == slurp(dir.path() / "r.json"));
    CHECK(slurp(dir.path() / "r2.csv") == slurp(dir.path() / "r.csv"));
}

TEST_CASE("a config file supplies flags and the command line overrides it") {
    TempDir dir("cli_config");
    write_mini_dataset(dir.path() / "gt", dir.path() / "pred");
    const auto cfg = dir.path() / "voskit.cfg";
    {
        std::ofstream out(cfg);
        out << "[evaluate]\n";
        out << "gt=\"" << (dir.path() / "gt").string() << "\"\n";
        out << "pred=\"" << (dir.path() / "pred").string() << "\"\n";
        out << "out-json=\"" << (dir.path() / "from_config.json").string() << "\"\n";
        out << "out-csv=\"" << (dir.path() / "from_config.csv").string() << "\"\n";
        out << "alpha=0.2\n";
    }

    CHECK(run_cli("--config " + cfg.string() + " evaluate > /dev/null 2>&1") == 0);
    const auto doc = nlohmann::json::parse(slurp(dir.path() / "from_config.json"));
    CHECK(doc["config"]["alpha"] == 0.2);

    // command line wins over the file
    CHECK(run_cli("--config " + cfg.string() + " evaluate --alpha 0.3 --out-json " +
                  (dir.path() / "cli.json").string() + " > /dev/null 2>&1") == 0);
    const auto doc2 = nlohmann::json::parse(slurp(dir.path() / "cli.json"));
    CHECK(doc2["config"]["alpha"] == 0.3);
}

TEST_CASE("ablate emits the threshold table") {
    TempDir dir("cli_ablate");
    write_mini_dataset(dir.path() / "gt", dir.path() / "pred");
    const auto csv_out = dir.path() / "ablation.csv";
    const auto json_out = dir.path() / "ablation.json";

    const int code = run_cli("ablate --gt " + (dir.path() / "gt").string() + " --pred " +
                             (dir.path() / "pred").string() +
                             " --threshold-grid 0,0.35,0.5,0.7,1 --out-csv " + csv_out.string() +
                             " --out-json " + json_out.string() + " > /dev/null 2>&1");
    CHECK(code == 0);
    const std::string csv = slurp(csv_out);
    CHECK(csv.find("\n0 (all w/ C),") != std::string::npos);
    CHECK(csv.find("\n0.35,") != std::string::npos);
    CHECK(csv.find("\n0.5,") != std::string::npos);
    CHECK(csv.find("\n0.7,") != std::string::npos);
    CHECK(csv.find("\n1 (w/o C),") != std::string::npos);

    // an empty grid is a usage error
    CHECK(run_cli("ablate --gt " + (dir.path() / "gt").string() + " --pred " +
                  (dir.path() / "pred").string() + " > /dev/null 2>&1") == 1);
}
