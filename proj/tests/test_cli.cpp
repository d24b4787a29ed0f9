// Exercises the command line binary (path supplied via the PPCTOOL
// environment variable) against the in-process API.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "ppc/fpca.hpp"
#include "ppc/io.hpp"
#include "ppc/ppc.hpp"
#include "ppc/simgen.hpp"
#include "ppc/smoothing.hpp"

using nlohmann::json;
using namespace ppc;

namespace {

std::string tool() {
  const char* p = std::getenv("PPCTOOL");
  REQUIRE(p != nullptr);
  return p;
}

int run(const std::string& args) {
  const int rc = std::system((tool() + " " + args + " 2>/dev/null").c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string tmp(const std::string& name) { return "/tmp/ppc_cli_" + name; }

}  // namespace

TEST_CASE("simulate is deterministic byte for byte") {
  REQUIRE(run("simulate --scheme 1 --level 1 --n 20 --grid 51 --seed 7 --out " +
              tmp("a.csv")) == 0);
  REQUIRE(run("simulate --scheme 1 --level 1 --n 20 --grid 51 --seed 7 --out " +
              tmp("b.csv")) == 0);
  CHECK(slurp(tmp("a.csv")) == slurp(tmp("b.csv")));
  CHECK(slurp(tmp("a.csv") + ".truth.csv") == slurp(tmp("b.csv") + ".truth.csv"));

  REQUIRE(run("simulate --scheme 1 --level 1 --n 20 --grid 51 --seed 8 --out " +
              tmp("c.csv")) == 0);
  CHECK(slurp(tmp("a.csv")) != slurp(tmp("c.csv")));
}

TEST_CASE("bundle pipeline matches the in-process pipeline") {
  const std::string curves = tmp("p.csv");
  const std::string bundle = tmp("p.json");
  REQUIRE(run("simulate --scheme 1 --level 1 --n 40 --grid 81 --noise 0.05 "
              "--seed 3 --out " +
              curves) == 0);
  REQUIRE(run("smooth --in " + curves + " --nbasis 20 --out " + bundle) == 0);
  REQUIRE(run("fpca --in " + bundle + " --truncate frac:0.8") == 0);
  REQUIRE(run("ppc --in " + bundle + " --years 4 --p 2") == 0);

  // same steps in process
  const RawCurveSet raw = read_curve_csv(curves);
  const double span =
      raw.times[raw.times.size() - 1] + (raw.times[1] - raw.times[0]);
  const FourierBasis basis = make_basis(span, 20, true);
  const SmoothingFit fit = smooth(raw, basis, default_lambda_grid());
  const FunctionalSample centered =
      center_crosssection(demean_timeseries(fit.sample));
  const FpcaResult full = fpca(centered);
  const FpcaResult trunc = truncate(full, TruncationRule::by_fraction(0.8));
  const PpcResult rot = ppc_rotation(trunc, periodic_sub_basis(basis, 4, 2));

  const json b = json::parse(slurp(bundle));
  CHECK(b.at("schema_version").get<int>() == 1);
  const auto& ev = b.at("fpca").at("eigenvalues");
  REQUIRE(static_cast<int>(ev.size()) == full.eigenvalues.size());
  for (int j = 0; j < full.eigenvalues.size(); ++j)
    CHECK(ev[j].get<double>() ==
          doctest::Approx(full.eigenvalues[j]).epsilon(1e-12));
  const auto& rho = b.at("ppc").at("rho");
  REQUIRE(static_cast<int>(rho.size()) == rot.correlations.size());
  for (int j = 0; j < rot.correlations.size(); ++j)
    CHECK(rho[j].get<double>() ==
          doctest::Approx(rot.correlations[j]).epsilon(1e-12));
  const auto& ppcs = b.at("ppc").at("ppcs");
  REQUIRE(static_cast<int>(ppcs.size()) == rot.ppcs.rows());
  for (int i = 0; i < rot.ppcs.rows(); ++i)
    for (int j = 0; j < rot.ppcs.cols(); ++j)
      CHECK(ppcs[i][j].get<double>() ==
            doctest::Approx(rot.ppcs(i, j)).epsilon(1e-12));
}

TEST_CASE("repeat runs of every bundle stage are identical") {
  const std::string curves = tmp("d.csv");
  REQUIRE(run("simulate --scheme 2 --level 5 --n 25 --grid 101 --seed 5 "
              "--out " +
              curves) == 0);
  for (const std::string suffix : {"1", "2"}) {
    const std::string b = tmp("d" + suffix + ".json");
    REQUIRE(run("smooth --in " + curves + " --nbasis 40 --out " + b) == 0);
    REQUIRE(run("fpca --in " + b + " --truncate frac:0.8") == 0);
    REQUIRE(run("varimax --in " + b + " --m 4") == 0);
    REQUIRE(run("ppc --in " + b + " --years 4 --p 2") == 0);
    REQUIRE(run("plotdata --in " + b + " --what cumvar --out " + b + ".csv " +
                "--svg " + b + ".svg") == 0);
  }
  CHECK(slurp(tmp("d1.json")) == slurp(tmp("d2.json")));
  CHECK(slurp(tmp("d1.json.csv")) == slurp(tmp("d2.json.csv")));
  CHECK(slurp(tmp("d1.json.svg")) == slurp(tmp("d2.json.svg")));
  // cumvar carries the four series
  const std::string csv = slurp(tmp("d1.json.csv"));
  for (const char* series : {",fpc,", ",ppc,", ",benchmark,", ",varimax,"})
    CHECK(csv.find(series) != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(run("bogus") == 2);
  CHECK(run("simulate --scheme 9 --out /tmp/x.csv") == 2);
  CHECK(run("ppc --in /nonexistent.json --years 4") == 3);
  CHECK(run("fpca --in " + tmp("a.csv")) == 3);  // CSV where a bundle is expected

  // bundle missing its fpca section
  const std::string b = tmp("nofpca.json");
  REQUIRE(run("smooth --in " + tmp("a.csv") + " --nbasis 10 --out " + b) == 0);
  CHECK(run("ppc --in " + b + " --years 4") == 3);
}
