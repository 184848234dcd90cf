#include <doctest.h>
#include <unistd.h>

#include <filesystem>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "ftl/serialization.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run ftlplan(std::initializer_list<std::string> args) {
  std::vector<std::string> owned{"ftlplan"};
  owned.insert(owned.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : owned) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  Run r;
  r.code = ftl::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

struct Workdir {
  fs::path dir;
  Workdir() {
    dir = fs::temp_directory_path() / ("ftl_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Workdir() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

const Workdir& work() {
  static const Workdir w;
  return w;
}

// A small library shared by the plan tests.
const std::string& library_file() {
  static const std::string file = [] {
    const std::string f = work() / "lib.json";
    REQUIRE(ftlplan({"gen-library", "--n", "400", "--seed", "3", "--out", f}).code == 0);
    return f;
  }();
  return file;
}

json load(const std::string& file) { return json::parse(ftl::read_file(file)); }

}  // namespace

TEST_CASE("gen-library: minimal library, summary and byte-stable rerun") {
  const Run r = ftlplan({"gen-library", "--n", "1", "--out", work() / "one.json"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("N_lib=1 D=60") != std::string::npos);
  CHECK(load(work() / "one.json")["shapes"].size() == 1);

  REQUIRE(ftlplan({"gen-library", "--n", "30", "--seed", "7", "--out", work() / "a.json"}).code == 0);
  REQUIRE(ftlplan({"gen-library", "--n", "30", "--seed", "7", "--out", work() / "b.json"}).code == 0);
  CHECK(ftl::read_file(work() / "a.json") == ftl::read_file(work() / "b.json"));
}

TEST_CASE("gen-library: cluster sidecar") {
  const Run r = ftlplan({"gen-library", "--n", "100", "--out", work() / "c_lib.json",
                         "--clusters-out", work() / "c_clusters.json"});
  REQUIRE(r.code == 0);
  const json c = load(work() / "c_clusters.json");
  CHECK(c["library_size"] == 100);
  CHECK(c["clusters"].size() > 1);
}

TEST_CASE("gen-library: unwritable output is an I/O error") {
  const Run r = ftlplan({"gen-library", "--n", "2", "--out", "/nonexistent/dir/lib.json"});
  CHECK(r.code == ftl::cli::kIoError);
  CHECK_FALSE(r.err.empty());
}

TEST_CASE("plan: clustered C curve tracks the tip exactly") {
  const std::string out = work() / "plan_c.json";
  const Run r = ftlplan({"plan", "--library", library_file(), "--generate", "C:1000", "--mode",
                         "clustered", "--out", out});
  REQUIRE(r.code == 0);
  const json j = load(out);
  CHECK(j["metrics"]["tip_dev_pct"].get<double>() < 1e-7);
  CHECK(j["dense"]["steps"].size() == 91);
  CHECK(j["sparse"]["entries"].size() == 10);
  CHECK(j["config"]["mode"] == "clustered");
  CHECK(j["config"]["library"] == library_file());
  CHECK(j["tool_version"] == ftl::tool_version());
}

TEST_CASE("plan: linear and clustered with gamma 0 give the same plan") {
  const std::string a = work() / "lin.json";
  const std::string b = work() / "clu.json";
  REQUIRE(ftlplan({"plan", "--library", library_file(), "--generate", "S:7", "--mode", "linear",
                   "--gamma", "0", "--out", a})
              .code == 0);
  REQUIRE(ftlplan({"plan", "--library", library_file(), "--generate", "S:7", "--mode",
                   "clustered", "--gamma", "0", "--out", b})
              .code == 0);
  const json ja = load(a);
  const json jb = load(b);
  CHECK(ja["sparse"]["entries"] == jb["sparse"]["entries"]);
  CHECK(ja["dense"] == jb["dense"]);
  CHECK(ja["metrics"]["shape_dev_pct"] == jb["metrics"]["shape_dev_pct"]);
}

TEST_CASE("plan: reruns without timing are byte-identical, thread count irrelevant") {
  const std::string a = work() / "r1.json";
  const std::string b = work() / "r2.json";
  REQUIRE(ftlplan({"plan", "--library", library_file(), "--generate", "Robot:5", "--mode",
                   "linear", "--no-timing", "--threads", "1", "--out", a})
              .code == 0);
  REQUIRE(ftlplan({"plan", "--library", library_file(), "--generate", "Robot:5", "--mode",
                   "linear", "--no-timing", "--threads", "3", "--out", b})
              .code == 0);
  CHECK(ftl::read_file(a) == ftl::read_file(b));
}

TEST_CASE("plan: path files and the cluster sidecar") {
  const std::string path = work() / "path.json";
  ftl::write_file_atomic(path, "{\"waypoints\":[[0,0,0],[0.1,0,0.5],[0.3,0,0.9],[0.6,0,1.2]]}");
  const std::string clusters = work() / "lib_clusters.json";
  REQUIRE(ftlplan({"gen-library", "--n", "400", "--seed", "3", "--out", work() / "lib2.json",
                   "--clusters-out", clusters})
              .code == 0);
  const Run r = ftlplan({"plan", "--library", work() / "lib2.json", "--clusters", clusters,
                         "--path", path, "--mode", "clustered", "--h", "4", "--out",
                         work() / "plan_file.json"});
  REQUIRE(r.code == 0);
  CHECK(load(work() / "plan_file.json")["dense"]["steps"].size() == 13);
}

TEST_CASE("plan: optimization baseline writes a dense plan without a sparse section") {
  const std::string out = work() / "opt.json";
  REQUIRE(ftlplan({"plan", "--generate", "Robot:2", "--mode", "optimization", "--h", "2",
                   "--out", out})
              .code == 0);
  const json j = load(out);
  CHECK(j["method"] == "optimization");
  CHECK_FALSE(j.contains("sparse"));
  CHECK(j["metrics"]["tip_dev_pct"].get<double>() > 0.0);
}

TEST_CASE("plan: short or malformed paths exit 3 without output") {
  const std::string two = work() / "two.json";
  ftl::write_file_atomic(two, "{\"waypoints\":[[0,0,0],[0,0,1]]}");
  const std::string out = work() / "never.json";
  CHECK(ftlplan({"plan", "--library", library_file(), "--path", two, "--out", out}).code ==
        ftl::cli::kInputError);
  CHECK_FALSE(fs::exists(out));

  const std::string bad = work() / "bad.json";
  ftl::write_file_atomic(bad, "{\"waypoints\":[[0,0,0],[0,0");
  CHECK(ftlplan({"plan", "--library", library_file(), "--path", bad, "--out", out}).code ==
        ftl::cli::kInputError);
  CHECK_FALSE(fs::exists(out));

  CHECK(ftlplan({"plan", "--library", library_file(), "--generate", "Q:1", "--out", out}).code ==
        ftl::cli::kInputError);
  CHECK(ftlplan({"plan", "--library", library_file(), "--generate", "C:1", "--mode", "fast",
                 "--out", out})
            .code == ftl::cli::kInputError);
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("plan: missing library is an I/O error") {
  CHECK(ftlplan({"plan", "--library", work() / "nope.json", "--generate", "C:1", "--out",
                 work() / "x.json"})
            .code == ftl::cli::kIoError);
}

TEST_CASE("argument errors and help") {
  CHECK(ftlplan({"plan", "--bogus"}).code == ftl::cli::kInputError);
  CHECK(ftlplan({}).code == ftl::cli::kInputError);
  const Run help = ftlplan({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("benchmark") != std::string::npos);
  CHECK(ftlplan({"--version"}).code == 0);
}

TEST_CASE("benchmark: CSV and JSON reports, byte-stable without timing") {
  const std::string d1 = work() / "bench1";
  const std::string d2 = work() / "bench2";
  for (const auto& d : {d1, d2}) {
    const Run r = ftlplan({"benchmark", "--n-lib", "300", "--paths-per-class", "1", "--methods",
                           "linear,clustered", "--no-timing", "--strict", "--out-dir", d});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("PASS tip-exact") != std::string::npos);
  }
  CHECK(ftl::read_file(d1 + "/benchmark.csv") == ftl::read_file(d2 + "/benchmark.csv"));
  CHECK(ftl::read_file(d1 + "/benchmark.json") == ftl::read_file(d2 + "/benchmark.json"));
  const json j = load(d1 + "/benchmark.json");
  CHECK(j["config"]["n_lib"] == 300);
  CHECK(j["config"]["timing"] == false);
  CHECK(j["aggregates"].size() == 6);
  CHECK(ftlplan({"benchmark", "--preset", "table9", "--out-dir", d1}).code ==
        ftl::cli::kInputError);
}

TEST_CASE("ablate: symmetry, cluster and libsize studies write their tables") {
  const std::string d = work() / "ablate";
  CHECK(ftlplan({"ablate", "--study", "symmetry", "--n-lib", "300", "--paths-per-class", "1",
                 "--out-dir", d})
            .code == 0);
  CHECK(ftl::read_file(d + "/ablate_symmetry.csv").find("Overall") != std::string::npos);
  const Run c = ftlplan({"ablate", "--study", "cluster", "--n-lib", "300", "--paths-per-class",
                         "1", "--gamma-factors", "0,1", "--no-timing", "--strict", "--out-dir", d});
  CHECK(c.code == 0);
  CHECK(c.out.find("PASS gamma0-equals-linear") != std::string::npos);
  const Run l = ftlplan({"ablate", "--study", "libsize", "--sizes", "100,200", "--paths-per-class",
                         "1", "--no-timing", "--strict", "--out-dir", d});
  CHECK(l.code == 0);
  CHECK(fs::exists(d + "/ablate_libsize.json"));
  CHECK(ftlplan({"ablate", "--study", "nothing", "--out-dir", d}).code == ftl::cli::kInputError);
}

TEST_CASE("validate: tip exactness check passes in strict mode") {
  const std::string d = work() / "validate";
  const Run r = ftlplan({"validate", "--check", "tip-exact", "--paths", "2", "--n-lib", "300",
                         "--strict", "--out-dir", d});
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS tip-exact") != std::string::npos);
  const json j = load(d + "/validate.json");
  CHECK(j["tip_exact"]["paths"] == 6);
  CHECK(j["checks"][0]["pass"] == true);
  CHECK(ftlplan({"validate", "--check", "everything", "--out-dir", d}).code ==
        ftl::cli::kInputError);
}
