#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "arisim/channel.hpp"
#include "arisim/config.hpp"
#include "arisim/errors.hpp"
#include "arisim/units.hpp"

using namespace arisim;

TEST_SUITE("config") {

TEST_CASE("experiment registry is sorted and self-consistent") {
  const auto& ids = config::experiment_ids();
  REQUIRE(ids.size() == 9);
  CHECK(std::is_sorted(ids.begin(), ids.end()));
  for (const auto& id : ids) {
    config::ExperimentConfig c = config::default_config(id);
    CHECK(c.id == id);
    CHECK_NOTHROW(c.validate());
    CHECK(c.trials >= 1);
  }
  CHECK_THROWS_AS(config::default_config("no-such-study"), ConfigError);
}

TEST_CASE("power quantities") {
  CHECK(config::parse_power_w("30 dBm") == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(config::parse_power_w("9 dBW") ==
        doctest::Approx(7.943282347242816).epsilon(1e-12));
  CHECK(config::parse_power_w("2 W") == 2.0);
  CHECK(config::parse_power_w("15 mW") == doctest::Approx(0.015));
  CHECK(config::parse_power_w("250 uW") == doctest::Approx(2.5e-4));
  CHECK(config::parse_power_w("  -10 dBm ") ==
        doctest::Approx(1e-4).epsilon(1e-12));
  CHECK_THROWS_AS(config::parse_power_w("5 V"), ConfigError);
  CHECK_THROWS_AS(config::parse_power_w("5"), ConfigError);
  CHECK_THROWS_AS(config::parse_power_w("watts"), ConfigError);
}

TEST_CASE("distance, frequency, ratio quantities") {
  CHECK(config::parse_distance_m("5 m") == 5.0);
  CHECK(config::parse_distance_m("3 cm") == doctest::Approx(0.03));
  CHECK(config::parse_distance_m("1.2 km") == doctest::Approx(1200.0));
  CHECK_THROWS_AS(config::parse_distance_m("5 ft"), ConfigError);

  CHECK(config::parse_frequency_hz("2.4 GHz") == doctest::Approx(2.4e9));
  CHECK(config::parse_frequency_hz("28 MHz") == doctest::Approx(2.8e7));
  CHECK(config::parse_frequency_hz("500 kHz") == doctest::Approx(5e5));
  CHECK(config::parse_frequency_hz("10 Hz") == 10.0);
  CHECK_THROWS_AS(config::parse_frequency_hz("2.4 THz"), ConfigError);

  CHECK(config::parse_ratio_linear("3 dB") ==
        doctest::Approx(std::pow(10.0, 0.3)).epsilon(1e-12));
  CHECK(config::parse_ratio_linear("2.5 linear") == 2.5);
  CHECK_THROWS_AS(config::parse_ratio_linear("x2.5"), ConfigError);
  CHECK(config::parse_db("7 dB") == 7.0);
  CHECK_THROWS_AS(config::parse_db("7 dBm"), ConfigError);
}

TEST_CASE("minimal document resolves over defaults") {
  config::ExperimentConfig c =
      config::load_config_text(R"({"experiment": "envelope-fig"})");
  CHECK(c.id == "envelope-fig");
  CHECK(c.trials == 1);
  CHECK(c.phase_grid == 1024);
  CHECK(c.seed == 1);
  CHECK(c.output_path.empty());
  CHECK_FALSE(c.paper_scale);
}

TEST_CASE("full override document") {
  const char* doc = R"({
    "experiment": "rate-vs-rho",
    "trials": 7,
    "seed": 99,
    "output": "out/custom.csv",
    "scenario": {
      "mimo": {
        "m_t": 2, "m_r": 2, "streams": 2, "n": 8, "n_act": 4,
        "p_t": "10 dBm", "p_ris": "250 mW", "f_c": "28 GHz",
        "d_rx_ris": "300 cm", "f_r": "7 dB"
      }
    },
    "ao": {"j_alt": 3, "optimize_ris": false},
    "sweep": {"rho": ["-10 dB", "0 dB"]}
  })";
  config::ExperimentConfig c = config::load_config_text(doc);
  CHECK(c.trials == 7);
  CHECK(c.seed == 99);
  CHECK(c.output_path == "out/custom.csv");
  CHECK(c.mimo.m_t == 2);
  CHECK(c.mimo.d == 2);
  CHECK(c.mimo.n == 8);
  CHECK(c.mimo.n_act == 4);
  CHECK(c.mimo.p_t_w == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(c.mimo.p_ris_w == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(c.mimo.omega_rad_s ==
        doctest::Approx(2.0 * units::kPi * 2.8e10).epsilon(1e-12));
  CHECK(c.mimo.d_rx_ris_m == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(c.mimo.f_r ==
        doctest::Approx(units::db_to_linear(7.0)).epsilon(1e-12));
  CHECK(c.ao.j_alt == 3);
  CHECK_FALSE(c.ao.optimize_ris);
  REQUIRE(c.rho_db_values.size() == 2);
  CHECK(c.rho_db_values[0] == -10.0);
  CHECK(c.rho_db_values[1] == 0.0);
}

TEST_CASE("siso overrides and link states") {
  const char* doc = R"({
    "experiment": "gamma-fit-table",
    "scenario": {"siso": {
      "n": 24, "p_t": "-10 dBm", "p_max": "10 dBm", "d_h": "25 m",
      "f_c": "2.4 GHz", "g_max": "35 dB", "link_h": "los", "link_g": "auto"
    }},
    "sweep": {"entries": [{"n": 24, "p_max": "10 dBm", "p_t": "-10 dBm"}]}
  })";
  config::ExperimentConfig c = config::load_config_text(doc);
  CHECK(c.siso.n_per_panel == 24);
  CHECK(c.siso.p_t_w == doctest::Approx(1e-4).epsilon(1e-12));
  CHECK(c.siso.geometry.d_h_m == 25.0);
  CHECK(c.siso.f_c_ghz == doctest::Approx(2.4).epsilon(1e-12));
  CHECK(c.siso.g_max ==
        doctest::Approx(units::db_to_linear(35.0)).epsilon(1e-12));
  CHECK(c.siso.state_h == channel::LinkState::los);
  CHECK(c.siso.state_g == channel::LinkState::automatic);
  REQUIRE(c.gamma_entries.size() == 1);
  CHECK(c.gamma_entries[0].n == 24);
  CHECK(c.gamma_entries[0].p_t_w == doctest::Approx(1e-4).epsilon(1e-12));

  CHECK_THROWS_AS(config::load_config_text(R"({
    "experiment": "gamma-fit-table",
    "scenario": {"siso": {"link_h": "blocked"}}
  })"),
                  ConfigError);
}

TEST_CASE("unknown keys are rejected everywhere") {
  CHECK_THROWS_AS(
      config::load_config_text(
          R"({"experiment": "envelope-fig", "bogus": 1})"),
      ConfigError);
  CHECK_THROWS_AS(config::load_config_text(R"({
    "experiment": "gamma-fit-table",
    "scenario": {"siso": {"p_tt": "1 W"}}
  })"),
                  ConfigError);
  CHECK_THROWS_AS(config::load_config_text(R"({
    "experiment": "rate-vs-rho",
    "scenario": {"lte": {}}
  })"),
                  ConfigError);
  CHECK_THROWS_AS(config::load_config_text(R"({
    "experiment": "rate-vs-rho",
    "sweep": {"grid": 256}
  })"),
                  ConfigError);
  CHECK_THROWS_AS(config::load_config_text(R"({
    "experiment": "rate-vs-rho",
    "ao": {"iterations": 5}
  })"),
                  ConfigError);
}

TEST_CASE("dimensioned values must carry units") {
  CHECK_THROWS_AS(config::load_config_text(R"({
    "experiment": "gamma-fit-table",
    "scenario": {"siso": {"p_t": 30}}
  })"),
                  ConfigError);
  CHECK_THROWS_AS(config::load_config_text(R"({
    "experiment": "rate-vs-rho",
    "scenario": {"mimo": {"d_rx_ris": 4}}
  })"),
                  ConfigError);
  // Plain numbers stay plain: a unit string where a number is expected.
  CHECK_THROWS_AS(config::load_config_text(R"({
    "experiment": "rate-vs-rho",
    "ao": {"j_alt": "3 dB"}
  })"),
                  ConfigError);
}

TEST_CASE("semantic validation failures") {
  CHECK_THROWS_AS(
      config::load_config_text(
          R"({"experiment": "envelope-fig", "trials": 0})"),
      ConfigError);
  CHECK_THROWS_AS(
      config::load_config_text(
          R"({"experiment": "envelope-fig", "seed": -4})"),
      ConfigError);
  CHECK_THROWS_AS(config::load_config_text(R"({
    "experiment": "ee-sweeps",
    "sweep": {"axis": "bandwidth"}
  })"),
                  ConfigError);
  CHECK_THROWS_AS(config::load_config_text(R"({
    "experiment": "rate-vs-pris",
    "sweep": {"n_act_fractions": [0.5, 1.5]}
  })"),
                  ConfigError);
  CHECK_THROWS_AS(config::load_config_text(R"({
    "experiment": "rate-vs-rho",
    "scenario": {"mimo": {"n": 8, "n_act": 12}}
  })"),
                  ConfigError);
  CHECK_THROWS_AS(config::load_config_text(R"({
    "experiment": "ber-vs-pt",
    "sweep": {"p_t": [], "setups": [{"n": 8, "p_max": "10 dBm"}]}
  })"),
                  ConfigError);
  CHECK_THROWS_AS(config::load_config_text("{}"), ConfigError);
  CHECK_THROWS_AS(config::load_config_text("not json"), ConfigError);
}

TEST_CASE("study-scale switch lifts the array and trial counts") {
  config::ExperimentConfig desk = config::default_config("rate-vs-rho");
  CHECK(desk.mimo.n == 32);
  CHECK(desk.mimo.m_t == 4);
  config::ExperimentConfig big = config::load_config_text(
      R"({"experiment": "rate-vs-rho", "paper_scale": true})");
  CHECK(big.paper_scale);
  CHECK(big.mimo.n == 64);
  CHECK(big.mimo.m_t == 8);
  CHECK(big.trials == 200);
  config::ExperimentConfig fits = config::load_config_text(
      R"({"experiment": "gamma-fit-table", "paper_scale": true})");
  CHECK(fits.gamma_entries.size() == 36);  // 2 caps x 2 sizes x 9 budgets
}

TEST_CASE("documents load identically from file and text") {
  std::filesystem::path dir =
      std::filesystem::temp_directory_path() / "arisim_cfg_test";
  std::filesystem::create_directories(dir);
  std::filesystem::path file = dir / "cfg.json";
  const char* doc =
      R"({"experiment": "rate-vs-dh", "trials": 5,
          "sweep": {"d_h": ["10 m", "25 m"], "n": [16]}})";
  {
    std::ofstream out(file);
    out << doc;
  }
  config::ExperimentConfig from_file = config::load_config(file.string());
  config::ExperimentConfig from_text = config::load_config_text(doc);
  CHECK(from_file.id == from_text.id);
  CHECK(from_file.trials == from_text.trials);
  REQUIRE(from_file.d_h_m_values.size() == 2);
  CHECK(from_file.d_h_m_values[1] == 25.0);
  CHECK(from_file.n_values == from_text.n_values);
  CHECK_THROWS_AS(config::load_config((dir / "absent.json").string()),
                  ConfigError);
  std::filesystem::remove_all(dir);
}

}  // TEST_SUITE("config")
