#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli_app.hpp"

using apcf::cli::run_cli;
using json = nlohmann::json;

namespace {

struct Run {
  int status;
  std::string out;
  std::string err;
  json doc() const { return json::parse(out); }
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  int status = run_cli(args, out, err);
  return {status, out.str(), err.str()};
}

std::string rat(const json& j) { return j["num"].get<std::string>() + "/" + j["den"].get<std::string>(); }

}  // namespace

TEST_CASE("expand, convergents, interval") {
  Run e = run({"expand", "7/10"});
  REQUIRE(e.status == 0);
  json d = e.doc();
  CHECK(d["command"] == "expand");
  CHECK(d["results"]["digits"] == json::array({"1", "2", "3"}));
  CHECK(rat(d["results"]["value"]) == "7/10");
  CHECK(d["config_hash"].get<std::string>().size() == 16);
  CHECK(d.contains("provenance"));
  CHECK(d["elapsed_ms"].is_number_integer());

  json c = run({"convergents", "1"}).doc();
  REQUIRE(c["results"]["convergents"].size() == 1);
  CHECK(c["results"]["convergents"][0]["p"] == "1");
  CHECK(c["results"]["convergents"][0]["q"] == "1");

  json i = run({"interval", "1,2"}).doc();
  CHECK(rat(i["results"]["lo"]) == "2/3");
  CHECK(rat(i["results"]["hi"]) == "3/4");
  CHECK(rat(i["results"]["length"]) == "1/12");
}

TEST_CASE("exit codes") {
  CHECK(run({"expand", "3/2"}).status == 1);
  CHECK(run({"expand", "abc"}).status == 2);
  CHECK(run({"expand"}).status == 2);
  CHECK(run({"frobnicate"}).status == 2);
  CHECK(run({}).status == 2);
  CHECK(run({"construct", "--family", "F", "--nu", "nu(n)=n", "--t", "1"}).status == 2);
  CHECK(run({"construct", "--family", "F", "--nu", "nu(n)=n", "--bogus", "1"}).status == 2);
  CHECK(run({"construct", "--family", "F", "--nu", "nu(n) = n +"}).status == 2);
  CHECK(run({"construct", "--family", "F", "--nu", "nu(n) = floor(n/10) + 1"}).status == 1);
  CHECK(run({"construct", "--family", "F", "--nu", "nu(n) = floor(n/10) + 3", "--non-strict", "--depth", "10"}).status == 0);
  CHECK(run({"verify", "nonsense"}).status == 2);
  CHECK(run({"--help"}).status == 0);
}

TEST_CASE("construct is reproducible") {
  std::vector<std::string> args{"construct", "--family", "F", "--nu", "nu(n)=n", "--t", "2", "--seed", "7", "--depth", "50"};
  Run a = run(args), b = run(args);
  REQUIRE(a.status == 0);
  json da = a.doc(), db = b.doc();
  CHECK(da["results"] == db["results"]);
  CHECK(da["config_hash"] == db["config_hash"]);
  CHECK(da["results"]["digits"].size() == 50);
  CHECK(da["results"]["strictly_increasing"] == true);

  auto csv = args;
  csv.insert(csv.end(), {"--format", "csv"});
  CHECK(run(csv).out == run(csv).out);

  json m = run({"construct", "--family", "F", "--nu", "nu(n)=n", "--depth", "5", "--mode", "min"}).doc();
  CHECK(m["results"]["digits"][0]["digit"] == "4");
  CHECK(m["results"]["digits"][1]["digit"] == "16");

  json g = run({"construct", "--sigma", "sigma(n)=n*(n+1)", "--t", "3", "--depth", "30"}).doc();
  CHECK(g["results"]["family"] == "G");
  CHECK(g["results"]["strictly_increasing"] == true);
}

TEST_CASE("config files and hashes") {
  namespace fs = std::filesystem;
  fs::path dir = fs::temp_directory_path() / "apcf_cli_test";
  fs::create_directories(dir);
  fs::path cfg = dir / "run.cfg";
  {
    std::ofstream f(cfg);
    f << "# experiment\nfamily = F\nnu = \"nu(n) = n\"\nt = 3\ndepth = 12\nseed = 4\n";
  }
  json a = run({"construct", "--config", cfg.string()}).doc();
  CHECK(a["results"]["t"] == 3);
  json b = run({"construct", "--config", cfg.string(), "--t", "2"}).doc();
  CHECK(b["results"]["t"] == 2);
  CHECK(a["config_hash"] != b["config_hash"]);

  json direct = run({"construct", "--family", "F", "--nu", "nu(n) = n", "--t", "3", "--depth", "12", "--seed", "4"}).doc();
  CHECK(direct["config_hash"] == a["config_hash"]);
  CHECK(direct["results"] == a["results"]);

  {
    std::ofstream f(dir / "bad.cfg");
    f << "colour = blue\n";
  }
  CHECK(run({"construct", "--config", (dir / "bad.cfg").string()}).status == 2);
  CHECK(run({"construct", "--config", (dir / "missing.cfg").string()}).status == 2);

  apcf::cli::Settings s{{"t", "2"}};
  CHECK(apcf::cli::config_hash("x", "", s) == apcf::cli::config_hash("x", "", s));
  CHECK(apcf::cli::config_hash("x", "", s) != apcf::cli::config_hash("y", "", s));
  // FNV-1a of "command=x\noperand=\nt=2\n" is fixed across platforms.
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : std::string("command=x\noperand=\nt=2\n")) h = (h ^ ch) * 1099511628211ull;
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << h;
  CHECK(apcf::cli::config_hash("x", "", s) == hex.str());

  fs::path out = dir / "out.json";
  fs::remove(out);
  Run w = run({"expand", "7/10", "--out", out.string()});
  CHECK(w.status == 0);
  CHECK(w.out.empty());
  std::ifstream in(out);
  json written = json::parse(in);
  CHECK(written["results"]["digits"].size() == 3);
  CHECK_FALSE(fs::exists(dir / "out.json.partial"));
  fs::remove_all(dir);
}

TEST_CASE("localdim and ratios") {
  Run l = run({"localdim", "--family", "F", "--nu", "nu(n)=n", "--t", "2", "--depth", "200", "--seed", "3"});
  REQUIRE(l.status == 0);
  json ld = l.doc();
  CHECK(ld["results"]["rows"].size() == 200);
  for (const auto& row : ld["results"]["rows"]) CHECK(row["ratio"].get<double>() >= row["bound"].get<double>() - 1e-6);

  json r = run({"ratios", "--family", "F", "--nu", "nu(n)=n", "--t", "2", "--k-max", "6"}).doc();
  REQUIRE(r["results"]["rows"].size() == 6);
  CHECK(r["results"]["rows"][0].contains("A"));
  CHECK(r["results"]["rows"][0].contains("B"));
  CHECK(r["results"]["rows"][0]["limit_A"].get<double>() == doctest::Approx(0.125));

  Run csv = run({"ratios", "--family", "F", "--nu", "nu(n)=n", "--k-max", "3", "--format", "csv"});
  CHECK(csv.out.rfind("k,A,A_error,B,", 0) == 0);

  json g = run({"ratios", "--sigma", "sigma = [2,4,8,16,32,64,128,256,512,1024,2048,4096,8192]", "--t", "2", "--k-max", "10"})
               .doc();
  auto rows = g["results"]["rows"];
  REQUIRE(rows.size() == 10);
  CHECK(rows[9]["A"].get<double>() > rows[3]["A"].get<double>());
  CHECK(run({"ratios", "--family", "F", "--nu", "nu(n)=n", "--k-max", "9"}).status == 1);
}

TEST_CASE("dim and certificate") {
  json f = run({"dim", "--family", "F", "--nu", "nu(n)=n", "--tol", "0.005"}).doc();
  CHECK(f["results"]["formula"].get<double>() == doctest::Approx(0.25));
  CHECK(std::fabs(f["results"]["scan_decimal"].get<double>() - 0.25) <= 0.01);
  CHECK(f["results"]["agreement"] == true);

  json g = run({"dim", "--family", "G", "--sigma", "sigma(n)=n*(n+1)"}).doc();
  CHECK(g["results"]["formula"].get<double>() == doctest::Approx(0.25).epsilon(1e-3));

  json z = run({"dim", "--family", "F", "--nu", "nu(n)=n^2"}).doc();
  CHECK(z["results"]["formula"].get<double>() == 0);

  Run c = run({"certificate", "--family", "G", "--sigma", "sigma(n)=n*(n-1)+1", "--s", "0.3"});
  REQUIRE(c.status == 0);
  CHECK(c.doc()["results"]["threshold"] == 15);
  CHECK(c.doc()["results"]["audit"].size() == 4);

  Run no = run({"certificate", "--family", "F", "--nu", "nu(n)=n", "--s", "0.24"});
  CHECK(no.status == 1);
  CHECK(no.doc()["results"]["accepted"] == false);
  CHECK(run({"certificate", "--family", "F", "--nu", "nu(n)=n"}).status == 2);
}

TEST_CASE("detect-ap and verify") {
  json a = run({"detect-ap", "1,3,5,6,8,10,12"}).doc();
  REQUIRE(a["results"]["runs"].size() == 2);
  CHECK(a["results"]["runs"][1]["start"] == 4);
  CHECK(a["results"]["runs"][1]["length"] == 4);

  json m = run({"detect-ap", "1,2,3,4,5", "--nu", "nu(n)=3"}).doc();
  CHECK(m["results"]["membership"]["witnesses"] == 3);

  Run v = run({"verify", "qn-bounds", "--format", "text"});
  CHECK(v.status == 0);
  CHECK(v.out.find("true") != std::string::npos);
  Run s = run({"verify", "series"});
  CHECK(s.status == 0);
  CHECK(s.doc()["results"]["passed"] == s.doc()["results"]["total"]);
}
