#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string cmd = std::string(ZADI_CLI_PATH) + " " + args + " > cli_out.txt 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string read_all(const std::string& path) {
    std::ifstream is(path);
    return std::string(std::istreambuf_iterator<char>(is), {});
}

void write_config(const std::string& path, const std::string& body) {
    std::ofstream os(path);
    os << body;
}

struct TmpDir {
    fs::path dir;
    explicit TmpDir(const std::string& name) : dir(fs::path("cli_test_") += name) {
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~TmpDir() { fs::remove_all(dir); }
};

}  // namespace

TEST_CASE("solve smoke test writes a field and a manifest") {
    TmpDir t("solve");
    write_config((t.dir / "cfg").string(),
                 "scheme = adi-milstein\n"
                 "rho_x = 0\nrho_y = 0\nrho_xy = 0\n"
                 "x_min = 0\nx_max = 4\ny_min = 0\ny_max = 4\n"
                 "h_x = 0.5\nh_y = 0.5\n"
                 "T = 0.25\nN = 4\nseed = 1\n");
    const int rc = run("solve --config " + (t.dir / "cfg").string() + " --out " +
                       (t.dir / "out").string());
    CHECK(rc == 0);
    CHECK(fs::exists(t.dir / "out" / "field.csv"));
    CHECK(fs::exists(t.dir / "out" / "summary.json"));
    CHECK(fs::exists(t.dir / "out" / "manifest.json"));
    // 7 x 7 interior nodes + header
    std::ifstream is(t.dir / "out" / "field.csv");
    int lines = 0;
    std::string line;
    while (std::getline(is, line))
        if (!line.empty()) ++lines;
    CHECK(lines == 50);
}

TEST_CASE("unknown config key names the offender and exits 2") {
    TmpDir t("badkey");
    write_config((t.dir / "cfg").string(), "scheme = adi-milstein\nbogus_key = 3\nseed = 1\n");
    const int rc = run("solve --config " + (t.dir / "cfg").string() + " --out " +
                       (t.dir / "out").string());
    CHECK(rc == 2);
    CHECK(read_all("cli_out.txt").find("bogus_key") != std::string::npos);
}

TEST_CASE("unknown preset exits 2") {
    TmpDir t("badpreset");
    const int rc = run("solve --preset paper-sec9 --seed 1 --out " + (t.dir / "out").string());
    CHECK(rc == 2);
}

TEST_CASE("missing seed exits 2") {
    TmpDir t("noseed");
    write_config((t.dir / "cfg").string(), "scheme = adi-milstein\nh_x = 0.5\nh_y = 0.5\n");
    const int rc = run("solve --config " + (t.dir / "cfg").string() + " --out " +
                       (t.dir / "out").string());
    CHECK(rc == 2);
    CHECK(read_all("cli_out.txt").find("seed") != std::string::npos);
}

TEST_CASE("impossible solver budget exits 3") {
    TmpDir t("hard");
    write_config((t.dir / "cfg").string(),
                 "scheme = implicit-milstein\n"
                 "mu_x = 0.0809\nmu_y = 0.0809\nrho_x = 0.2\nrho_y = 0.2\nrho_xy = 0.45\n"
                 "x_min = 0\nx_max = 4\ny_min = 0\ny_max = 4\n"
                 "h_x = 0.25\nh_y = 0.25\n"
                 "T = 1\nN = 2\nseed = 3\n"
                 "tol = 1e-30\nmax_iter = 1\n");
    const int rc = run("solve --config " + (t.dir / "cfg").string() + " --out " +
                       (t.dir / "out").string());
    CHECK(rc == 3);
}

TEST_CASE("levy-check audit passes and writes its report") {
    TmpDir t("levy");
    const int rc =
        run("levy-check --seed 7 --out " + (t.dir / "out").string());
    CHECK(rc == 0);
    CHECK(fs::exists(t.dir / "out" / "levy_check.json"));
}

TEST_CASE("stability report with the section-5 preset") {
    TmpDir t("stab");
    const int rc = run("stability --preset paper-sec5 --seed 1 --out " +
                       (t.dir / "out").string());
    CHECK(rc == 0);
    const std::string rep = read_all((t.dir / "out" / "stability.json").string());
    CHECK(rep.find("margins") != std::string::npos);
    CHECK(rep.find("explicit_cfl") != std::string::npos);
}

TEST_CASE("seed flag overrides the config seed") {
    TmpDir t("seedover");
    write_config((t.dir / "cfg").string(),
                 "scheme = adi-milstein\nrho_x = 0\nrho_y = 0\n"
                 "x_min = 0\nx_max = 4\ny_min = 0\ny_max = 4\n"
                 "h_x = 0.5\nh_y = 0.5\nT = 0.25\nN = 4\nseed = 1\n");
    REQUIRE(run("solve --config " + (t.dir / "cfg").string() + " --seed 42 --out " +
                (t.dir / "out").string()) == 0);
    const std::string manifest = read_all((t.dir / "out" / "manifest.json").string());
    CHECK(manifest.find("\"seed\": \"42\"") != std::string::npos);
}

TEST_CASE("paper presets reproduce the published parameter sets") {
    TmpDir t("presets");
    REQUIRE(run("stability --preset paper-sec5 --seed 1 --out " +
                (t.dir / "s5").string()) == 0);
    const std::string m5 = read_all((t.dir / "s5" / "manifest.json").string());
    for (const char* frag : {"\"mu_x\": \"0.0809\"", "\"rho_x\": \"0.2\"",
                             "\"rho_xy\": \"0.45\"", "\"x0\": \"2\""})
        CHECK(m5.find(frag) != std::string::npos);

    REQUIRE(run("levy-check --preset paper-sec6 --seed 1 --out " +
                (t.dir / "s6").string()) == 0);
    const std::string m6 = read_all((t.dir / "s6" / "manifest.json").string());
    for (const char* frag : {"\"kappa1\": \"2\"", "\"xi1\": \"0.5\"", "\"theta1\": \"0.4\"",
                             "\"rho_11\": \"0.3\"", "\"rho_21\": \"0.2\"",
                             "\"rho_3\": \"0.5\"", "\"y0\": \"1.4\""})
        CHECK(m6.find(frag) != std::string::npos);
}
