#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

const fs::path& scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("trojan_cli_test_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string first_line(const std::string& text) {
    return text.substr(0, text.find('\n'));
}

// env_prefix example: "TROJAN_OUTPUT_DIR=/some/dir "
RunResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    const char* bin = std::getenv("TROJAN_CLI");
    REQUIRE(bin != nullptr);
    static int counter = 0;
    const fs::path so = scratch() / ("stdout_" + std::to_string(counter) + ".txt");
    const fs::path se = scratch() / ("stderr_" + std::to_string(counter) + ".txt");
    ++counter;
    const std::string cmd = env_prefix + "\"" + bin + "\" " + args + " > \"" + so.string() +
                            "\" 2> \"" + se.string() + "\"";
    const int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(so);
    r.err = slurp(se);
    return r;
}

json load_json(const fs::path& p) {
    REQUIRE(fs::exists(p));
    return json::parse(slurp(p));
}

}  // namespace

TEST_CASE("equilibrium subcommand reproduces the unit-circle configuration") {
    const fs::path out = scratch() / "eq_circle.json";
    const RunResult r =
        run_cli("equilibrium --omega 1 --epsilon 0 --branch +1 --output \"" + out.string() + "\"");
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    const json j = load_json(out);
    CHECK(j["side_length"].get<double>() == 1.0);
    CHECK(j["class"] == "TypeI_Langmuir");
    CHECK(j["root_index"] == 0);
    CHECK(j["params"]["omega"].get<double>() == 1.0);
    CHECK(j["params"]["branch"].get<int>() == 1);
    CHECK(j["residual"].get<double>() < 1e-10);
    REQUIRE(j["positions"].size() == 2);
    REQUIRE(j["positions"][0].size() == 3);
    REQUIRE(j["momenta"].size() == 2);
    CHECK(j["roots"].size() == 1);
    CHECK(j["stability"]["eigenvalues"].size() == 12);
    CHECK(j["stability"].contains("max_real_part"));
    CHECK(j["stability"].contains("stable"));
    CHECK(first_line(r.out).find("equilibrium:") == 0);
}

TEST_CASE("outputs are byte-identical across reruns") {
    const fs::path csv = scratch() / "repeat_scan.csv";
    const std::string scan_args = "scan --omega 0.3:0.7:3 --epsilon 0.9:2:3 --branch -1 "
                                  "--threads 2 --output \"" + csv.string() + "\"";
    REQUIRE(run_cli(scan_args).code == 0);
    const std::string scan_first = slurp(csv);
    const std::string summary_first = slurp(scratch() / "repeat_scan.json");
    REQUIRE(run_cli(scan_args).code == 0);
    CHECK(slurp(csv) == scan_first);
    CHECK(slurp(scratch() / "repeat_scan.json") == summary_first);
    CHECK(first_line(scan_first) == "omega,epsilon,branch,root_index,side_length,max_real_part,stable");

    const fs::path dj = scratch() / "repeat_dmc.json";
    const std::string dmc_args =
        "dmc --omega 0.5 --epsilon 10.01685357830875 --branch -1 --walker-target 100 "
        "--time-step 0.02 --equilibration-steps 25 --accumulation-steps 25 --seed 3 "
        "--threads 2 --output \"" + dj.string() + "\"";
    REQUIRE(run_cli(dmc_args).code == 0);
    const std::string dmc_first = slurp(dj);
    const fs::path plane_csv = scratch() / "repeat_dmc_xz.csv";
    const std::string plane_first = slurp(plane_csv);
    REQUIRE(run_cli(dmc_args).code == 0);
    CHECK(slurp(dj) == dmc_first);
    CHECK(slurp(plane_csv) == plane_first);
    CHECK(first_line(plane_first) == "bin_x,bin_y,count_e1,count_e2");

    const json dmc_json = json::parse(dmc_first);
    CHECK(dmc_json.contains("energy"));
    CHECK(dmc_json.contains("error"));
    CHECK(dmc_json.contains("lobe_centers"));
    CHECK(dmc_json.contains("matched_cubic_root"));
    CHECK(dmc_json["config"]["seed"].get<std::uint64_t>() == 3);
    for (const auto& lc : dmc_json["lobe_centers"])
        CHECK((lc["electron"].get<int>() == 1 || lc["electron"].get<int>() == 2));
}

TEST_CASE("usage errors exit 2 and name the offending token") {
    CHECK(run_cli("nosuchcommand").code == 2);
    CHECK(run_cli("").code == 2);

    const RunResult unknown = run_cli("equilibrium --bogus 1");
    CHECK(unknown.code == 2);
    CHECK(unknown.err.find("--bogus") != std::string::npos);

    const RunResult bad_range = run_cli("scan --omega 0.7:0.3:5 --epsilon 0:1:3 --branch -1");
    CHECK(bad_range.code == 2);
    CHECK(bad_range.err.find("--omega") != std::string::npos);

    const RunResult bad_value = run_cli("equilibrium --omega banana");
    CHECK(bad_value.code == 2);

    const RunResult bad_class = run_cli("equilibrium --omega 0.5 --epsilon 1 --branch -1 "
                                        "--class IV");
    CHECK(bad_class.code == 2);

    CHECK(run_cli("--help").code == 0);
    CHECK(run_cli("equilibrium --help").code == 0);
}

TEST_CASE("domain errors exit 1") {
    // collinear outward equilibrium needs a field to lean against
    const fs::path out = scratch() / "iiia_eps0.json";
    const RunResult r = run_cli("equilibrium --class IIIa --omega 0.3 --epsilon 0 --branch -1 "
                                "--output \"" + out.string() + "\"");
    CHECK(r.code == 1);
    CHECK_FALSE(r.err.empty());
    CHECK_FALSE(fs::exists(out));

    // no Langmuir root below the saddle-node threshold
    const RunResult r2 = run_cli("equilibrium --omega 0.5 --epsilon 0.5 --branch -1 "
                                 "--root-index 0 --output \"" +
                                 (scratch() / "noroot.json").string() + "\"");
    CHECK(r2.code == 1);
}

TEST_CASE("config file merge with command-line override") {
    const fs::path cfg = scratch() / "merge.cfg";
    {
        std::ofstream f(cfg);
        f << "# comment line\n";
        f << "omega = 0.6\n";
        f << "epsilon = 1.5\n";
    }
    const fs::path out = scratch() / "merged.json";
    const RunResult r = run_cli("equilibrium --config \"" + cfg.string() +
                                "\" --omega 0.7 --branch -1 --output \"" + out.string() + "\"");
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    CHECK(r.err.find("overrides config value") != std::string::npos);
    const json j = load_json(out);
    CHECK(j["params"]["omega"].get<double>() == 0.7);
    CHECK(j["params"]["epsilon"].get<double>() == 1.5);

    // unknown config keys are usage errors
    const fs::path bad = scratch() / "bad.cfg";
    {
        std::ofstream f(bad);
        f << "omega = 0.6\nnot_a_flag = 1\n";
    }
    CHECK(run_cli("equilibrium --config \"" + bad.string() + "\" --branch -1").code == 2);
}

TEST_CASE("default output names honor TROJAN_OUTPUT_DIR") {
    const fs::path dir = scratch() / "outdir";
    fs::create_directories(dir);
    const RunResult r = run_cli("units --omega 0.5 --epsilon 1 --branch -1",
                                "TROJAN_OUTPUT_DIR=\"" + dir.string() + "\" ");
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    const json j = load_json(dir / "units.json");
    CHECK(j["params"]["omega"].get<double>() == 0.5);
    CHECK(j["params"]["input_mode"] == "scaled");
}

TEST_CASE("trajectory CSV headers track dims and frame") {
    const fs::path out3 = scratch() / "traj3.csv";
    const RunResult r3 = run_cli("integrate --omega 0.5 --epsilon 1.5 --branch -1 "
                                 "--root-index 1 --periods 0.25 --samples-per-period 16 "
                                 "--output \"" + out3.string() + "\"");
    CAPTURE(r3.err);
    REQUIRE(r3.code == 0);
    CHECK(first_line(slurp(out3)) == "t,x1,y1,z1,x2,y2,z2,px1,py1,pz1,px2,py2,pz2,energy");

    const fs::path out2 = scratch() / "traj2.csv";
    const RunResult r2 = run_cli("integrate --omega 0.5 --epsilon 1.2 --branch -1 --dims 2 "
                                 "--class II --angle 1.5707963267948966 --periods 0.25 "
                                 "--samples-per-period 16 --output \"" + out2.string() + "\"");
    CAPTURE(r2.err);
    REQUIRE(r2.code == 0);
    CHECK(first_line(slurp(out2)) == "t,x1,y1,x2,y2,px1,py1,px2,py2,energy");

    // lab-frame output keeps the rotating-frame energy column: for an
    // equilibrium the energy is constant even though coordinates rotate
    const fs::path lab = scratch() / "traj_lab.csv";
    const RunResult rl = run_cli("integrate --omega 0.5 --epsilon 1.5 --branch -1 "
                                 "--root-index 1 --periods 1 --samples-per-period 8 "
                                 "--lab-frame --output \"" + lab.string() + "\"");
    REQUIRE(rl.code == 0);
    std::istringstream lines(slurp(lab));
    std::string line;
    std::getline(lines, line);  // header
    double e_first = 0.0;
    bool first = true;
    int rows = 0;
    while (std::getline(lines, line)) {
        const std::size_t pos = line.rfind(',');
        REQUIRE(pos != std::string::npos);
        const double e = std::stod(line.substr(pos + 1));
        if (first) {
            e_first = e;
            first = false;
        } else {
            CHECK(e == Catch::Approx(e_first).margin(1e-9));
        }
        ++rows;
    }
    CHECK(rows == 9);
}

TEST_CASE("zvs-slice emits the expected grid") {
    const fs::path out = scratch() / "slice.csv";
    const RunResult r = run_cli("zvs-slice --omega 0.5 --epsilon 1.5 --branch -1 "
                                "--root-index 1 --coord1 x1 --coord2 z1 "
                                "--range1=-8:-4:5 --range2 1:4:4 --output \"" + out.string() +
                                "\"");
    CAPTURE(r.err);
    REQUIRE(r.code == 0);
    const std::string text = slurp(out);
    CHECK(first_line(text) == "coord1,coord2,value");
    int lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    CHECK(lines == 21);  // header + 5*4 points

    const RunResult bad = run_cli("zvs-slice --omega 0.5 --epsilon 1.5 --branch -1 "
                                  "--coord1 x1 --coord2 x1 --range1 0:1:3 --range2 0:1:3");
    CHECK(bad.code == 2);
    const RunResult badz = run_cli("zvs-slice --omega 0.5 --epsilon 1.2 --branch -1 --dims 2 "
                                   "--class II --coord1 x1 --coord2 z1 --range1 0:1:3 "
                                   "--range2 0:1:3");
    CHECK(badz.code == 2);
}

TEST_CASE("scan rows carry empty fields where no equilibrium exists") {
    const fs::path out = scratch() / "gap_scan.csv";
    const RunResult r = run_cli("scan --omega 0.4:0.6:2 --epsilon 0.2:0.4:2 --branch -1 "
                                "--output \"" + out.string() + "\"");
    REQUIRE(r.code == 0);
    std::istringstream lines(slurp(out));
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        // omega,epsilon,branch then four empty fields
        CHECK(line.find(",-1,,,,") != std::string::npos);
    }
    CHECK(rows == 4);

    const json summary = load_json(scratch() / "gap_scan.json");
    CHECK(summary["cells"].get<int>() == 4);
    CHECK(summary["cells_with_equilibrium"].get<int>() == 0);
    CHECK(summary["stable_cells"].get<int>() == 0);
}
