#include "menuprune/io/csv.hpp"

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(MENUPRUNE_EXE) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe);
  char buf[4096];
  while (const auto n = fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, n);
  const int st = pclose(pipe);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / "menuprune_test_cli" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::vector<std::string>> rows(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::vector<std::string>> out;
  for (std::string line; std::getline(in, line);) out.push_back(menuprune::io::split_csv_line(line));
  return out;
}

fs::path config(const fs::path& dir, const json& extra) {
  json j = {{"instance", std::string(MENUPRUNE_CONFIGS) + "/table1_instance.json"},
            {"grid", 4},
            {"n", {3, 2}},
            {"metrics", {"linf", "l1", "jbased", "onestep"}},
            {"output", dir.string()}};
  if (extra.is_object()) j.update(extra);
  const auto p = dir / "cfg.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

std::set<std::string> ids(const fs::path& menu_csv) {
  std::set<std::string> out;
  auto r = rows(menu_csv);
  for (std::size_t k = 1; k < r.size(); ++k) out.insert(r[k][0]);
  return out;
}

}  // namespace

TEST_CASE("missing files exit with status 2") {
  CHECK(run("solve -c /nonexistent/cfg.json").status == 2);
  const auto dir = fresh_dir("nosolution");
  CHECK(run("prune -c " + config(dir, {}).string()).status == 2);
}

TEST_CASE("usage errors") {
  CHECK(run("").status != 0);
  CHECK(run("frobnicate").status != 0);
  const auto dir = fresh_dir("badmetric");
  CHECK(run("prune -c " + config(dir, {}).string() + " --metric l2").status == 1);
}

TEST_CASE("two-by-two smoke solve") {
  const auto dir = fresh_dir("smoke");
  const auto t0 = std::chrono::steady_clock::now();
  const auto r = run("solve -c " + config(dir, {{"grid", 2}}).string());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(r.status == 0);
  CHECK(secs < 1.0);
  const auto sol = rows(dir / "solution.csv");
  REQUIRE(sol.size() == 5);
  CHECK(sol[0] == std::vector<std::string>{"i", "x1", "x2", "u", "q1", "q2", "p"});
  const auto info = json::parse(slurp(dir / "solve_info.json"));
  CHECK(info.at("converged").get<bool>());
  CHECK(info.at("ic_residual").get<double>() <= 1e-6);
  CHECK(std::stod(slurp(dir / "jref.txt")) == doctest::Approx(info.at("j_ref").get<double>()));
}

TEST_CASE("solver failure exits with status 1") {
  const auto dir = fresh_dir("fail");
  CHECK(run("solve -c " + config(dir, {{"solver", {{"max_iter", 1}}}}).string()).status == 1);
}

TEST_CASE("sweep writes nested menus and is reproducible") {
  const auto a = fresh_dir("sweep_a");
  const auto b = fresh_dir("sweep_b");
  REQUIRE(run("sweep --no-timing -c " + config(a, {}).string()).status == 0);
  REQUIRE(run("sweep --no-timing -c " + config(b, {}).string()).status == 0);
  for (const std::string m : {"linf", "l1", "jbased", "onestep"}) {
    for (const std::string f : {"menu_3.csv", "menu_2.csv", "cells_3.csv", "cells_2.csv", "trace.csv", "losses.csv"}) {
      REQUIRE(fs::exists(a / m / f));
      CHECK_MESSAGE(slurp(a / m / f) == slurp(b / m / f), m << "/" << f);
    }
    const auto small = ids(a / m / "menu_2.csv");
    const auto large = ids(a / m / "menu_3.csv");
    CHECK(small.size() == 2);
    CHECK(large.size() == 3);
    CHECK(std::includes(large.begin(), large.end(), small.begin(), small.end()));
    std::set<std::string> cell_ids;
    auto cells = rows(a / m / "cells_3.csv");
    for (std::size_t k = 1; k < cells.size(); ++k) cell_ids.insert(cells[k][0]);
    CHECK(cell_ids == large);
    auto losses = rows(a / m / "losses.csv");
    CHECK(losses[0] == std::vector<std::string>{"t", "loss", "shift", "ms_cum"});
  }
  CHECK(slurp(a / "solution.csv") == slurp(b / "solution.csv"));
}

TEST_CASE("prune with global comparison and a single metric") {
  const auto dir = fresh_dir("compare");
  const auto cfg = config(dir, {}).string();
  REQUIRE(run("solve -c " + cfg).status == 0);
  REQUIRE(run("prune -c " + cfg + " --metric jbased -n 2 --compare-global").status == 0);
  CHECK_FALSE(fs::exists(dir / "l1"));
  CHECK(rows(dir / "jbased" / "losses.csv")[0].back() == "global_ms_cum");
  const auto info = json::parse(slurp(dir / "prune_info.json"));
  CHECK(info.at("jbased").at("global_same_order").get<bool>());
  REQUIRE(run("prune -c " + cfg + " --metric l1 -n 2 --protect-reservation").status == 0);
  // the reservation contract is protected and stays in the menu
  const auto menu = rows(dir / "l1" / "menu_2.csv");
  CHECK(menu.size() == 3);
  CHECK(json::parse(slurp(dir / "prune_info.json")).at("protect_reservation").get<bool>());
}

TEST_CASE("validate: default seed passes, injected fault fails") {
  const auto ok = run("validate");
  CHECK(ok.status == 0);
  const auto report = json::parse(ok.out);
  CHECK(report.at("pass").get<bool>());
  bool counters = false;
  for (const auto& p : report.at("properties")) {
    CHECK_MESSAGE(p.at("pass").get<bool>(), p.at("name").get<std::string>());
    if (p.at("name") == "counter_bounds") {
      counters = true;
      for (const auto& m : p.at("metrics")) CHECK(m.contains("max_m"));
    }
  }
  CHECK(counters);

  const auto bad = run("validate --inject-fault skip-local-refresh");
  CHECK(bad.status == 1);
  const auto rep = json::parse(bad.out);
  CHECK_FALSE(rep.at("pass").get<bool>());
  CHECK_FALSE(rep.at("properties")[0].at("pass").get<bool>());
  CHECK(run("validate --seed 5").status == 0);
}
