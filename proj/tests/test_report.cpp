#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "procure/error.hpp"
#include "procure/report.hpp"

using namespace procure;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<scenarios::ScenarioResult> grid_rows() {
  std::vector<scenarios::ScenarioResult> rows;
  for (double x : {5.0, 8.0}) {
    for (double y : {500.0, 2000.0}) {
      scenarios::ScenarioResult r;
      r.coordinates = {{"sigma", x}, {"a3", y}};
      r.alpha_star = 1000.0 / (x * y);
      r.q_star = 50.0 + x / 10.0;
      rows.push_back(r);
    }
  }
  return rows;
}

}  // namespace

TEST_CASE("atomic writes leave no temporary files") {
  const fs::path dir = fs::temp_directory_path() / "procure_report_test";
  fs::remove_all(dir);
  report::write_atomic(dir / "nested" / "a.txt", "hello\n");
  CHECK(slurp(dir / "nested" / "a.txt") == "hello\n");
  report::write_atomic(dir / "nested" / "a.txt", "again\n");
  CHECK(slurp(dir / "nested" / "a.txt") == "again\n");
  std::size_t files = 0;
  for (const auto& e : fs::directory_iterator(dir / "nested")) files += e.is_regular_file();
  CHECK(files == 1);
  fs::remove_all(dir);
}

TEST_CASE("scenario CSV header and formatting") {
  const auto csv = report::scenario_csv(grid_rows());
  const auto header = csv.substr(0, csv.find('\n'));
  CHECK(header ==
        "sigma,a3,alpha_star,q_star,expected_profit_usd,fill_rate,penalty_rate,std_error,"
        "kkt_max_residual,status");
  CHECK(csv.find("\n5,500,0.40,50.500000,") != std::string::npos);
}

TEST_CASE("heatmap outputs") {
  const auto rows = grid_rows();
  const auto csv = report::heatmap_csv(rows, report::HeatmapValue::alpha_star);
  CHECK(csv.rfind("x,y,value\n", 0) == 0);
  CHECK(csv.find("8,2000,0.062500") != std::string::npos);
  const auto svg = report::heatmap_svg(rows, report::HeatmapValue::q_star);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  std::size_t rects = 0;
  for (auto pos = svg.find("<rect"); pos != std::string::npos; pos = svg.find("<rect", pos + 1)) {
    ++rects;
  }
  CHECK(rects == 4 + 20);  // cells plus legend
  std::vector<scenarios::ScenarioResult> one_axis(1);
  one_axis[0].coordinates = {{"sigma", 5.0}};
  CHECK_THROWS_AS(report::heatmap_csv(one_axis, report::HeatmapValue::alpha_star), Error);
}

TEST_CASE("histogram normalization") {
  RandomStream rng(1);
  const auto x = TruncatedNormal(50.0, 8.0, 30.0, 70.0).sample(rng, 100000);
  const auto bins = report::histogram(x, 30.0, 70.0);
  CHECK(bins.size() == 40);
  double mass = 0.0;
  for (const auto& b : bins) mass += b.density * (b.right - b.left);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(bins.front().left == 30.0);
  CHECK(bins.back().right == 70.0);
  CHECK(report::histogram_csv(bins).rfind("bin_left,bin_right,density\n", 0) == 0);
  CHECK(report::samples_csv(std::vector<double>{1.5}) == "demand\n1.5\n");
}

TEST_CASE("demand CSV parsing") {
  CHECK(report::parse_demand_csv("demand\n1\n2.5\n\n3\n", "d.csv") ==
        std::vector<double>{1.0, 2.5, 3.0});
  CHECK(report::parse_demand_csv("demand\r\n4\r\n", "d.csv") == std::vector<double>{4.0});
  try {
    report::parse_demand_csv("demand\n1\nabc\n", "d.csv");
    FAIL("expected validation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::validation);
    CHECK(std::string(e.what()).find("d.csv:3") != std::string::npos);
  }
  try {
    report::parse_demand_csv("", "d.csv");
    FAIL("expected empty_data");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::empty_data);
  }
  try {
    report::parse_demand_csv("demand\n", "d.csv");
    FAIL("expected empty_data");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::empty_data);
  }
  CHECK_THROWS_AS(report::parse_demand_csv("value\n1\n", "d.csv"), Error);
  CHECK_THROWS_AS(report::parse_demand_csv("demand\n1,2\n", "d.csv"), Error);
}

TEST_CASE("variance CSV") {
  const std::vector<std::string> names{"sigma", "a3"};
  const std::vector<double> shares{25.0, 75.0};
  CHECK(report::variance_csv(names, shares) ==
        "parameter,variance_share_percent\nsigma,25.0000\na3,75.0000\n");
}
