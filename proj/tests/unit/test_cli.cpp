#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "lpdgcn/cli.hpp"
#include "lpdgcn/harness.hpp"

using namespace lpdgcn;

namespace {

struct Outcome {
  int code = 0;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string mutag_setting() { return "dataset_root=" + test_support::mutag_root().string(); }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("inspect prints dataset statistics") {
    const auto r = invoke({"--set", mutag_setting(), "inspect"});
    CHECK(r.code == 0);
    CHECK(r.out.find("# effective configuration") != std::string::npos);
    CHECK(r.out.find("graphs        188") != std::string::npos);
    CHECK(r.out.find("classes       2") != std::string::npos);
    CHECK(r.out.find("avg nodes     17.93") != std::string::npos);
    CHECK(r.out.find("node labels   7") != std::string::npos);
  }

  TEST_CASE("gradcheck succeeds") {
    const auto r = invoke({"gradcheck"});
    CHECK(r.code == 0);
    CHECK(r.out.find("ok (tolerance") != std::string::npos);
  }

  TEST_CASE("usage errors exit with status 2") {
    CHECK(invoke({"inspect", "--no-such-flag"}).code == 2);
    CHECK(invoke({}).code == 2);
    const auto r = invoke({"--set", "no_such_key=1", "inspect"});
    CHECK(r.code == 2);
    CHECK(r.err.find("no_such_key") != std::string::npos);
    CHECK(invoke({"--set", "lambda=-1", "inspect"}).code == 2);
  }

  TEST_CASE("a missing dataset is a runtime error") {
    const auto r = invoke({"--set", "dataset_root=/nonexistent/place", "inspect"});
    CHECK(r.code == 1);
    CHECK(r.err.rfind("error: ", 0) == 0);
  }

  TEST_CASE("compare reads two summaries") {
    CVReport a;
    a.variant = "full";
    a.dataset = "MUTAG";
    a.fold_accuracies = {0.9, 0.95, 0.85, 1.0};
    a.mean = 0.925;
    const auto dir = test_support::scratch_dir("cli_compare");
    write_text(dir / "a.json", cv_report_to_json(a).dump());
    write_text(dir / "b.json", cv_report_to_json(a).dump());
    const auto r = invoke({"compare", (dir / "a.json").string(), (dir / "b.json").string()});
    CHECK(r.code == 0);
    const auto pos = r.out.find("p = ");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(r.out.substr(pos + 4)) >= 0.99);
    CHECK(invoke({"compare", (dir / "a.json").string(), (dir / "missing.json").string()}).code == 1);
  }

  TEST_CASE("train writes a curve") {
    const auto dir = test_support::scratch_dir("cli_train");
    const auto r = invoke({"--set", mutag_setting(), "--set", "epochs=1", "--set", "hidden=8", "--set",
                           "readout_dim=8", "--set", "decoder_hidden=8", "-o", dir.string(), "train", "--fold", "0"});
    CHECK(r.code == 0);
    CHECK(std::filesystem::exists(dir / "full_train.csv"));
    CHECK(std::filesystem::exists(dir / "full_train_params.json"));
    CHECK(r.out.find("test accuracy") != std::string::npos);
  }
}
