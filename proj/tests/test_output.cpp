#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "cbdcnk/csv.hpp"
#include "cbdcnk/svg.hpp"
#include "helpers.hpp"

using namespace cbdcnk;
using cbdcnk::testing::baseline_fixture;

TEST_CASE("numbers are formatted with 12 significant digits") {
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.1945) == "0.1945");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(-123.832712345678) == "-123.832712346");
}

TEST_CASE("atomic writes leave no temp files behind") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "cbdcnk_test_out";
  fs::remove_all(dir);
  std::string path = (dir / "nested" / "file.csv").string();
  write_text_atomic(path, "a,b\n1,2\n");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "a,b");
  CHECK_FALSE(fs::exists(path + ".tmp"));
  fs::remove_all(dir);
}

TEST_CASE("steady-state CSV covers every variable deterministically") {
  const auto& fx = baseline_fixture();
  std::string a = steady_state_csv(fx.ss);
  std::string b = steady_state_csv(fx.ss);
  CHECK(a == b);
  CHECK(std::count(a.begin(), a.end(), '\n') == kNumVars + 1);
  CHECK(a.find("zeta,0.1945") != std::string::npos);
  CHECK(a.find("\r") == std::string::npos);  // LF endings only
}

TEST_CASE("IRF CSV has one row per quarter plus header") {
  IrfResult irf = compute_irf(baseline_fixture().first, "lambda", std::log(1.25), 40);
  std::string csv = irf_csv(irf);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 42);  // header + t = 0..40
  CHECK(csv.substr(0, 8) == "quarter,");
  CHECK(csv.find("chi_n_bp") != std::string::npos);
  CHECK(csv.find("c_pct") != std::string::npos);
}

TEST_CASE("welfare table CSV is six rows by five columns") {
  std::vector<TwoStepRow> rows(6);
  rows[0].banking = BankingStructure::monopolist;
  rows[3].banking = BankingStructure::competitive;
  std::string csv = welfare_table_csv(rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
  std::string header = csv.substr(0, csv.find('\n'));
  CHECK(std::count(header.begin(), header.end(), ',') == 4);  // 5 columns
}

TEST_CASE("overlay SVG renders panels and legends") {
  IrfResult a = compute_irf(baseline_fixture().first, "lambda", std::log(1.25), 20);
  a.variant_label = "taylor-cbdc";
  IrfResult b = a;
  b.variant_label = "fixed-cbdc";
  IrfOverlay ov = overlay_irfs({a, b});
  std::string svg = overlay_svg(ov);
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("taylor-cbdc") != std::string::npos);
  CHECK(svg.find("fixed-cbdc") != std::string::npos);
  CHECK(overlay_svg(ov) == svg);  // deterministic bytes
}
