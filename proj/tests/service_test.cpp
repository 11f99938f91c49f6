#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include "csdplan/service.hpp"
#include "support.hpp"

using namespace csdplan;
using csdplan::testing::data_path;
using csdplan::testing::reference_calibration;

namespace {

class ApiTest : public ::testing::Test {
 protected:
  Session session{reference_calibration(), data_path("reference_calibration.json")};
  ApiHandler api{session};

  ApiResponse post(const std::string& path, const json& body) const { return api.handle("POST", path, body.dump()); }
};

json solve_body(Count cores = 1) {
  return {{"workload", "count"}, {"host", "host0"}, {"csd", "newport"}, {"cores", cores}};
}

json sweep_body() {
  return {{"workload", "vector_addition"}, {"host", "host0"},          {"csd", "newport"},
          {"cores", 1},                    {"mode", "hardware"},       {"axis_x", "r_tx:1:8:1"},
          {"axis_y", {{"parameter", "r_comp"}, {"start", 1}, {"stop", 8}, {"step", 1}}}};
}

}  // namespace

TEST_F(ApiTest, CalibrationSummary) {
  const auto r = api.handle("GET", "/api/v1/calibration", "");
  ASSERT_EQ(r.status, 200);
  const auto j = json::parse(r.body);
  ASSERT_EQ(j["workloads"].size(), 4u);
  EXPECT_EQ(j["workloads"][3]["classes"][0]["kind"], "compute_intensive");
  EXPECT_EQ(j["csds"][0]["bandwidth_ratio"], 3.4e9 / 2.5e9);
}

TEST_F(ApiTest, SolveMatchesLibrary) {
  const auto r = post("/api/v1/solve", solve_body());
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(json::parse(r.body), to_json(solve_scenario(reference_calibration(), csdplan::testing::solve_request("count", "host0", "newport", 1))));
}

TEST_F(ApiTest, SolveCoreBoundIs422) {
  const auto r = post("/api/v1/solve", solve_body(65));
  EXPECT_EQ(r.status, 422);
  EXPECT_NE(json::parse(r.body)["error"].get<std::string>().find("max_cores = 64"), std::string::npos);
}

TEST_F(ApiTest, SolveSlowdownBelowOneIs422) {
  auto body = solve_body();
  body["sd_comp"] = 0.5;
  EXPECT_EQ(post("/api/v1/solve", body).status, 422);
}

TEST_F(ApiTest, FieldErrorsAre400) {
  auto body = solve_body();
  body.erase("cores");
  auto r = post("/api/v1/solve", body);
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(json::parse(r.body)["field"], "cores");
  body = solve_body();
  body["cores"] = "four";
  EXPECT_EQ(json::parse(post("/api/v1/solve", body).body)["field"], "cores");
  body = solve_body();
  body["colour"] = 1;
  EXPECT_EQ(post("/api/v1/solve", body).status, 400);
  EXPECT_EQ(api.handle("POST", "/api/v1/solve", "{not json").status, 400);
  EXPECT_EQ(api.handle("POST", "/api/v1/solve", "").status, 400);
}

TEST_F(ApiTest, UnknownNamesAre404) {
  auto body = solve_body();
  body["csd"] = "missing";
  EXPECT_EQ(post("/api/v1/solve", body).status, 404);
  EXPECT_EQ(api.handle("GET", "/api/v1/nothing", "").status, 404);
  EXPECT_EQ(post("/api/v1/nothing", json::object()).status, 404);
  EXPECT_EQ(api.handle("GET", "/api/v1/solve", "").status, 405);
}

TEST_F(ApiTest, InfeasibleIsNotAnHttpError) {
  auto body = solve_body(4);
  body["workload"] = "array_merge";
  body["csd"] = "smartssd";
  const auto r = post("/api/v1/solve", body);
  ASSERT_EQ(r.status, 200);
  EXPECT_TRUE(json::parse(r.body)["oracle"]["infeasible"].get<bool>());
}

TEST_F(ApiTest, SweepAndIso) {
  const auto r = post("/api/v1/sweep", sweep_body());
  ASSERT_EQ(r.status, 200) << r.body;
  const auto j = json::parse(r.body);
  EXPECT_EQ(j["values"].size(), 64u);
  auto iso = sweep_body();
  iso["c"] = 4;
  const auto c = json::parse(post("/api/v1/iso", iso).body);
  EXPECT_EQ(c["points"].size(), 5u);
  EXPECT_EQ(c["points"][0], (json{{"x", 2.0}, {"y", 7.0}}));
}

TEST_F(ApiTest, SweepCap) {
  auto body = sweep_body();
  body["axis_x"] = "r_tx:0.001:1:0.001";  // 1000 x 1000 cells
  body["axis_y"] = "r_comp:0.001:1:0.001";
  EXPECT_EQ(post("/api/v1/sweep", body).status, 413);
  body["axis_y"] = "r_comp:0.004:1:0.004";  // 1000 x 250, exactly at the cap
  EXPECT_EQ(post("/api/v1/sweep", body).status, 200);
}

TEST_F(ApiTest, SweepDomainErrors) {
  auto body = sweep_body();
  body["mode"] = "overload";
  EXPECT_EQ(post("/api/v1/sweep", body).status, 422);  // r_tx axis not valid for overload
  body["axis_x"] = "sd_tx:0.5:1:0.5";
  body["axis_y"] = "sd_comp:1,2";
  EXPECT_EQ(post("/api/v1/sweep", body).status, 422);
  body["mode"] = "diagonal";
  EXPECT_EQ(post("/api/v1/sweep", body).status, 400);
  body = sweep_body();
  body["axis_x"] = "r_tx:2:1:1";
  EXPECT_EQ(post("/api/v1/sweep", body).status, 400);
}

TEST_F(ApiTest, Curves) {
  const json body = {{"workload", "count"},
                     {"configs", {"csd:newport", {{"kind", "host"}, {"name", "host0"}, {"cores", 16}, {"k_limit", 8}}}},
                     {"m_max", 16},
                     {"normalize_to", "csd:newport"}};
  const auto r = post("/api/v1/curves", body);
  ASSERT_EQ(r.status, 200) << r.body;
  const auto j = json::parse(r.body);
  EXPECT_EQ(j["series"][1]["label"], "host0(16)[k=8]");
  EXPECT_EQ(j["series"][1]["points"][7]["throughput_norm"], j["series"][1]["points"][15]["throughput_norm"]);
}

TEST_F(ApiTest, Diff) {
  const json body = {{"workload", "array_merge"}, {"host", "host0"}, {"csd", "newport"}, {"cores", 1},
                     {"sd_comp_values", {1, 2}}};
  const auto j = json::parse(post("/api/v1/diff", body).body);
  EXPECT_EQ(j["points"][1]["bep"], 6);
}

TEST_F(ApiTest, Tco) {
  std::ifstream in(data_path("reference_costs.json"));
  const json body = json::parse(in);
  const auto r = post("/api/v1/tco", body);
  ASSERT_EQ(r.status, 200) << r.body;
  const auto j = json::parse(r.body);
  EXPECT_EQ(j["rows"][0]["total_cost"], 3028.0);
  EXPECT_EQ(j["rows"][1]["saved_vs_baseline_percent"], 32);
  auto bad = body;
  bad["candidates"][0]["cpu"] = "Xeon";
  EXPECT_EQ(post("/api/v1/tco", bad).status, 404);
}

TEST_F(ApiTest, RootServesPage) {
  const auto r = api.handle("GET", "/", "");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(r.content_type.rfind("text/html", 0), 0u);
}

TEST_F(ApiTest, ReloadSwapsAtomically) {
  const auto before = session.snapshot();
  auto cal = reference_calibration();
  cal.workloads.pop_back();
  std::erase_if(cal.measurements, [](const auto& m) { return m.workload == "page_rank"; });
  const auto path = (std::filesystem::temp_directory_path() / "csdplan_service_reload.json").string();
  std::ofstream(path) << save_calibration(cal);

  const auto r = post("/api/v1/calibration/reload", {{"path", path}});
  ASSERT_EQ(r.status, 200) << r.body;
  EXPECT_EQ(json::parse(api.handle("GET", "/api/v1/calibration", "").body)["workloads"].size(), 3u);
  EXPECT_EQ(before->workloads.size(), 4u);  // an in-flight snapshot is unaffected

  std::ofstream(path) << "{}";
  EXPECT_EQ(post("/api/v1/calibration/reload", {{"path", path}}).status, 400);
  EXPECT_EQ(session.snapshot()->workloads.size(), 3u);  // failed reload keeps the current set
}

TEST_F(ApiTest, ConcurrentIdenticalRequests) {
  const std::string body = sweep_body().dump();
  const std::string expected = api.handle("POST", "/api/v1/sweep", body).body;
  std::vector<std::string> got(8);
  {
    std::vector<std::jthread> threads;
    for (std::size_t i = 0; i < got.size(); ++i)
      threads.emplace_back([&, i] { got[i] = api.handle("POST", "/api/v1/sweep", body).body; });
  }
  for (const auto& g : got) EXPECT_EQ(g, expected);
}

TEST(ServerSmoke, RealSocket) {
  Session session(reference_calibration());
  Server server(session, {"127.0.0.1", 0, ""});
  const int port = server.bind();
  std::thread t([&] { server.listen(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  const auto res = client.Post("/api/v1/solve", solve_body().dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["bep"], 12);
  const auto bad = client.Post("/api/v1/solve", solve_body(65).dump(), "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 422);
  const auto summary = client.Get("/api/v1/calibration");
  ASSERT_TRUE(summary);
  EXPECT_EQ(json::parse(summary->body)["workloads"].size(), 4u);

  server.stop();
  t.join();
}
