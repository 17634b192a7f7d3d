#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "tcq/io.hpp"

namespace fs = std::filesystem;

namespace {

struct run_result {
  int code;
  std::string out;
};

run_result run(const std::string& args, const fs::path& dir) {
  const std::string cmd = "cd '" + dir.string() + "' && '" TCQ_CLI "' " + args + " 2>stderr.txt";
  std::string out;
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

fs::path workdir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("tcq_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

const char* small = "[solver]\ncharge_cutoff = 3\n";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("spectrum: json and csv carry identical numbers") {
    const auto d = workdir("spectrum");
    write(d / "c.ini", small);
    const auto j = run("-c c.ini spectrum --f-beta 0.41 --f-eps 0.433", d);
    REQUIRE(j.code == 0);
    const auto c = run("-c c.ini spectrum --f-beta 0.41 --f-eps 0.433 --format csv", d);
    REQUIRE(c.code == 0);
    const auto doc = nlohmann::json::parse(j.out);
    const auto t = tcq::parse_csv(c.out);
    REQUIRE(t.rows.size() == 1);
    for (std::size_t i = 0; i < t.header.size(); ++i) CHECK(doc.at(t.header[i]).get<double>() == t.rows[0][i]);
    CHECK(doc["provenance"]["config_sha256"].get<std::string>().size() == 64);
  }

  TEST_CASE("malformed config exits nonzero and names the key") {
    const auto d = workdir("badcfg");
    write(d / "c.ini", "[circuit]\nic_uAA = 1\n");
    const auto r = run("-c c.ini spectrum", d);
    CHECK(r.code == 2);
    const auto err = tcq::read_file(d / "stderr.txt");
    CHECK(err.find("ic_uAA") != std::string::npos);
    CHECK(r.out.empty());
  }

  TEST_CASE("sweep: empty range, cache reuse, job-count independence") {
    const auto d = workdir("sweep");
    write(d / "c.ini", small);
    const auto e = run("-c c.ini sweep --f-beta-lo 0.4 --f-beta-hi 0.39", d);
    CHECK(e.code == 0);
    CHECK(e.out == "f_beta,f_eps_sym,delta_Hz,gamma1_Hz,alpha\n");
    const auto a = run("-c c.ini -j 2 sweep --f-beta-lo 0.38 --f-beta-hi 0.42 --step 0.02 -o s.csv", d);
    REQUIRE(a.code == 0);
    const auto first = tcq::read_file(d / "s.csv");
    CHECK(tcq::parse_csv(first).rows.size() == 3);
    const auto b = run("-c c.ini sweep --f-beta-lo 0.38 --f-beta-hi 0.42 --step 0.02", d);
    CHECK(b.out == first);
    CHECK(tcq::read_file(d / "stderr.txt").find("\"computed\":0") != std::string::npos);
    const auto c = run("-c c.ini --no-cache sweep --f-beta-lo 0.38 --f-beta-hi 0.42 --step 0.02", d);
    CHECK(c.out == first);
  }

  TEST_CASE("fit output pipes into a config bit-exactly") {
    const auto d = workdir("emit");
    write(d / "c.ini", "[solver]\ncharge_cutoff = 2\nlevels = 2\nforce_iterative = true\n");
    // data from a circuit with modified currents, fitted back starting from the defaults
    write(d / "truth.ini",
          "[circuit]\nic_A = 2.4e-07 1.3e-07 2.3e-07 4.2e-07 5.8e-07 1.9e-07\n"
          "[solver]\ncharge_cutoff = 2\nlevels = 2\nforce_iterative = true\n");
    std::string csv = "f_beta,f_eps,freq_Hz\n";
    for (const char* fb : {"0.36", "0.4", "0.44"})
      for (const char* fe : {"0.41", "0.425", "0.435", "0.45"}) {
        const auto r = run(std::string("-c truth.ini spectrum --f-beta ") + fb + " --f-eps " + fe, d);
        REQUIRE(r.code == 0);
        csv += std::string(fb) + "," + fe + "," + tcq::format_number(nlohmann::json::parse(r.out)["delta_Hz"].get<double>()) + "\n";
      }
    write(d / "data.csv", csv);
    const auto f = run("-c c.ini fit-spectroscopy data.csv --emit-config fitted.ini", d);
    REQUIRE(f.code == 0);
    const auto doc = nlohmann::json::parse(f.out);
    CHECK(doc["model"] == "circuit");
    CHECK(doc["parameters"]["ic4_A"].get<double>() == doctest::Approx(4.2e-7).epsilon(1e-6));
    const auto rerun = run("-c fitted.ini -o again.json fit-spectroscopy data.csv --model circuit", d);
    REQUIRE(rerun.code == 0);
    // the emitted config carries the fitted currents exactly
    const auto cfg = tcq::read_file(d / "fitted.ini");
    const auto p0 = cfg.find("ic_A = ");
    REQUIRE(p0 != std::string::npos);
    std::istringstream is(cfg.substr(p0 + 7, cfg.find('\n', p0) - p0 - 7));
    for (int i = 1; i <= 6; ++i) {
      double x;
      is >> x;
      CHECK(x == doc["parameters"]["ic" + std::to_string(i) + "_A"].get<double>());
    }
  }

  TEST_CASE("calibrate: synthesize is seed-deterministic and calibrates") {
    const auto d = workdir("cal");
    REQUIRE(run("calibrate --synthesize --pixels 96 --noise 0.05 --seed 4 -o a.csv", d).code == 0);
    REQUIRE(run("calibrate --synthesize --pixels 96 --noise 0.05 --seed 4 -o b.csv", d).code == 0);
    CHECK(tcq::read_file(d / "a.csv") == tcq::read_file(d / "b.csv"));
    const auto r = run("calibrate a.csv", d);
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["W"][0][0].get<double>() == doctest::Approx(1.0e-3).epsilon(0.01));
    CHECK(doc["W"][1][1].get<double>() == doctest::Approx(1.2e-3).epsilon(0.01));
    CHECK(doc["provenance"]["input_sha256"].get<std::string>().size() == 64);
    write(d / "broken.csv", "i_beta_A,i_eps_A,s21_mag\n0,0,1\n0,1,1\n1,0,1\n");
    CHECK(run("calibrate broken.csv -o never.json", d).code == 3);
    CHECK_FALSE(fs::exists(d / "never.json"));
  }

  TEST_CASE("reflections: VSWR 1 rows equal the sweep rate") {
    const auto d = workdir("refl");
    write(d / "c.ini", small);
    const auto s = run("-c c.ini sweep --f-beta-lo 0.42 --f-beta-hi 0.42", d);
    const auto r = run("-c c.ini reflections --vswr 1,4 --zq 0.2 --f-beta-lo 0.42 --f-beta-hi 0.42", d);
    REQUIRE(r.code == 0);
    const auto ts = tcq::parse_csv(s.out), tr = tcq::parse_csv(r.out);
    REQUIRE(tr.rows.size() == 2);
    CHECK(tr.rows[0][tr.column("gamma1_Hz")] == doctest::Approx(ts.rows[0][ts.column("gamma1_Hz")]).epsilon(1e-12));
    CHECK(tr.rows[1][tr.column("vswr")] == 4.0);
  }

  TEST_CASE("decoherence and convergence emit their schemas") {
    const auto d = workdir("dec");
    write(d / "c.ini", small);
    const auto r = run("-c c.ini decoherence --f-beta-lo 0.42 --f-beta-hi 0.42", d);
    REQUIRE(r.code == 0);
    const auto t = tcq::parse_csv(r.out);
    CHECK(t.header == std::vector<std::string>{"f_beta", "gamma_phi_tl_Hz", "gamma_phi_1f_Hz", "gamma10_bias_Hz",
                                               "gamma10_1f_Hz", "gamma10_qp_Hz", "t_eff_K"});
    CHECK(t.rows.size() == 1);
    const auto c = run("-c c.ini convergence --f-beta 0.42 --f-eps 0.44 --n-min 2 --n-max 4", d);
    REQUIRE(c.code == 0);
    CHECK(tcq::parse_csv(c.out).rows.size() == 3);
  }
}
