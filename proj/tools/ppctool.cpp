// Command line front end for the periodic-component toolkit.
//
// Stages communicate through JSON bundles so intermediate results can be
// inspected and re-run:
//   simulate -> curve CSV (+ ground-truth sidecar)
//   smooth   -> bundle with fitted coefficients
//   fpca / varimax / ppc -> bundle sections added in place
//   decompose / plotdata -> CSV (and optional SVG) outputs
//   test / stability     -> operate on curve CSVs directly
//
// Exit codes: 0 success, 2 usage, 3 data error, 4 numerical failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "ppc/errors.hpp"
#include "ppc/fpca.hpp"
#include "ppc/io.hpp"
#include "ppc/periodicity.hpp"
#include "ppc/ppc.hpp"
#include "ppc/simgen.hpp"
#include "ppc/smoothing.hpp"

using nlohmann::json;
using namespace ppc;

namespace {

constexpr int kSchemaVersion = 1;

json vec_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vec_from_json(const json& a) {
  Eigen::VectorXd v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
  return v;
}

json mat_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vec_to_json(m.row(i)));
  return rows;
}

Eigen::MatrixXd mat_from_json(const json& rows) {
  if (rows.empty()) return {};
  Eigen::MatrixXd m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size())
      throw parse_error("ragged matrix in bundle");
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      m(i, j) = rows[i][j].get<double>();
  }
  return m;
}

json basis_to_json(const FourierBasis& b) {
  return {{"time_span", b.time_span()},
          {"num_functions", b.num_functions()},
          {"include_constant", b.has_constant()}};
}

FourierBasis basis_from_json(const json& j) {
  return make_basis(j.at("time_span").get<double>(),
                    j.at("num_functions").get<int>(),
                    j.at("include_constant").get<bool>());
}

json sample_to_json(const FunctionalSample& s, const std::vector<std::string>& ids) {
  json j = {{"basis", basis_to_json(s.basis)},
            {"coefficients", mat_to_json(s.coefficients)},
            {"demeaned", s.demeaned},
            {"centered", s.centered}};
  if (s.mean.size() > 0) j["mean"] = vec_to_json(s.mean);
  if (!ids.empty()) j["ids"] = ids;
  return j;
}

FunctionalSample sample_from_json(const json& j, std::vector<std::string>* ids) {
  FunctionalSample s;
  s.basis = basis_from_json(j.at("basis"));
  s.coefficients = mat_from_json(j.at("coefficients"));
  s.demeaned = j.at("demeaned").get<bool>();
  s.centered = j.at("centered").get<bool>();
  if (j.contains("mean")) s.mean = vec_from_json(j.at("mean"));
  if (ids != nullptr && j.contains("ids"))
    *ids = j.at("ids").get<std::vector<std::string>>();
  return s;
}

json load_bundle(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open bundle: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw parse_error("malformed bundle " + path + ": " + e.what());
  }
  if (!j.contains("schema_version") ||
      j["schema_version"].get<int>() != kSchemaVersion)
    throw parse_error("bundle " + path + " has an unsupported schema version");
  return j;
}

void save_bundle(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot write: " + path);
  out << j.dump(2) << "\n";
}

TruncationRule parse_truncation(const std::string& spec) {
  if (spec.rfind("count:", 0) == 0)
    return TruncationRule::by_count(std::stoi(spec.substr(6)));
  if (spec.rfind("frac:", 0) == 0)
    return TruncationRule::by_fraction(std::stod(spec.substr(5)));
  throw CLI::ValidationError("--truncate", "expected count:M or frac:q");
}

std::vector<double> parse_lambda_grid(const std::string& spec) {
  if (spec.empty() || spec == "default") return default_lambda_grid();
  std::vector<double> grid;
  std::stringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) grid.push_back(std::stod(tok));
  if (grid.empty())
    throw CLI::ValidationError("--lambda-grid", "no values parsed");
  return grid;
}

std::vector<int> parse_m_list(const std::string& spec) {
  // "lo:hi:step" or a comma list
  std::vector<int> out;
  if (spec.find(':') != std::string::npos) {
    int lo, hi, step;
    char c1, c2;
    std::stringstream ss(spec);
    if (!(ss >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' ||
        step <= 0)
      throw CLI::ValidationError("--m-list", "expected lo:hi:step");
    for (int m = lo; m <= hi; m += step) out.push_back(m);
  } else {
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ','))
      if (!tok.empty()) out.push_back(std::stoi(tok));
  }
  if (out.empty()) throw CLI::ValidationError("--m-list", "no values parsed");
  return out;
}

Eigen::VectorXd uniform_grid(double span, int n) {
  Eigen::VectorXd t(n);
  for (int j = 0; j < n; ++j) t[j] = span * j / n;
  return t;
}

double infer_span(const RawCurveSet& raw) {
  const Eigen::Index n = raw.times.size();
  if (n < 2) throw insufficient_data_error("need at least two grid points");
  return raw.times[n - 1] + (raw.times[1] - raw.times[0]);
}

// ---------------------------------------------------------------- commands

struct SimulateArgs {
  int scheme = 1;
  double level = 1.0;
  int n = 200;
  std::uint64_t seed = 0;
  double t = 100.0;
  int years = 4;
  int hfd_freq = 19;
  int grid = 201;
  double noise = 0.0;
  std::string out;
};

int run_simulate(const SimulateArgs& a) {
  SchemeConfig cfg;
  cfg.scheme = a.scheme;
  cfg.level = a.level;
  cfg.n_curves = a.n;
  cfg.seed = a.seed;
  cfg.time_span = a.t;
  cfg.years = a.years;
  cfg.hfd_freq = a.hfd_freq;
  cfg.n_grid = a.grid;
  cfg.noise_sd = a.noise;
  const GeneratedSet gen = generate(cfg);
  write_curve_csv(a.out, gen.raw);
  write_coefficient_csv(a.out + ".truth.csv", gen.raw.ids,
                        gen.truth.coefficients);
  return 0;
}

struct SmoothArgs {
  std::string in, out, coef_out;
  int nbasis = 0;
  double t = 0.0;
  std::string lambda_grid = "default";
};

int run_smooth(const SmoothArgs& a) {
  const RawCurveSet raw = read_curve_csv(a.in);
  raw.validate();
  const double span = a.t > 0.0 ? a.t : infer_span(raw);
  const int nbasis = a.nbasis > 0 ? a.nbasis : raw.n_points() - 1;
  const FourierBasis basis = make_basis(span, nbasis, true);
  const SmoothingFit fit = smooth(raw, basis, parse_lambda_grid(a.lambda_grid));

  json gcv = json::array();
  for (const auto& [lambda, score] : fit.gcv_trace)
    gcv.push_back({{"lambda", lambda}, {"gcv", score}});
  json bundle = {
      {"schema_version", kSchemaVersion},
      {"config",
       {{"command", "smooth"},
        {"in", a.in},
        {"nbasis", nbasis},
        {"time_span", span},
        {"lambda_grid", a.lambda_grid}}},
      {"curves", sample_to_json(fit.sample, raw.ids)},
      {"smoothing",
       {{"lambda", fit.lambda}, {"edf", fit.edf}, {"gcv_trace", gcv}}}};
  save_bundle(a.out, bundle);
  if (!a.coef_out.empty())
    write_coefficient_csv(a.coef_out, raw.ids, fit.sample.coefficients);
  return 0;
}

struct FpcaArgs {
  std::string in, out, truncate_spec = "frac:0.8";
};

int run_fpca(const FpcaArgs& a) {
  json bundle = load_bundle(a.in);
  std::vector<std::string> ids;
  FunctionalSample sample = sample_from_json(bundle.at("curves"), &ids);
  if (sample.basis.has_constant() && !sample.demeaned)
    sample = demean_timeseries(sample);
  const FunctionalSample centered = center_crosssection(sample);
  const FpcaResult full = fpca(centered);
  const TruncationRule rule = parse_truncation(a.truncate_spec);
  const int m = select_components(full, rule);

  bundle["curves"] = sample_to_json(centered, ids);
  bundle["fpca"] = {
      {"eigenvalues", vec_to_json(full.eigenvalues)},
      {"components", mat_to_json(full.components)},
      {"total_variance", full.total_variance},
      {"m", m},
      {"rule",
       {{"kind", rule.kind == TruncationRule::Kind::Count ? "count" : "frac"},
        {"count", rule.count},
        {"fraction", rule.fraction}}}};
  save_bundle(a.out.empty() ? a.in : a.out, bundle);
  return 0;
}

FpcaResult fpca_from_bundle(const json& bundle, const FunctionalSample& centered) {
  if (!bundle.contains("fpca"))
    throw parse_error("bundle has no fpca section; run `fpca` first");
  const json& f = bundle.at("fpca");
  FpcaResult full;
  full.basis = centered.basis;
  full.eigenvalues = vec_from_json(f.at("eigenvalues"));
  full.components = mat_from_json(f.at("components"));
  full.total_variance = f.at("total_variance").get<double>();
  full.scores = centered.coefficients * full.components.transpose();
  return full;
}

struct VarimaxArgs {
  std::string in, out;
  int m = 0;
  int grid = 201;
};

int run_varimax(const VarimaxArgs& a) {
  json bundle = load_bundle(a.in);
  const FunctionalSample centered = sample_from_json(bundle.at("curves"), nullptr);
  const FpcaResult full = fpca_from_bundle(bundle, centered);
  const int m = a.m > 0 ? a.m : bundle.at("fpca").at("m").get<int>();
  const Eigen::VectorXd grid = uniform_grid(centered.basis.time_span(), a.grid);
  const VarimaxResult vr = varimax(full, m, grid);

  bundle["varimax"] = {{"m", m},
                       {"rotation", mat_to_json(vr.rotation)},
                       {"components", mat_to_json(vr.rotated_components)},
                       {"explained_variance", vec_to_json(vr.explained_variance)},
                       {"converged", vr.converged}};
  save_bundle(a.out.empty() ? a.in : a.out, bundle);
  return 0;
}

struct PpcArgs {
  std::string in, out;
  int years = 1;
  int p = 2;
};

int run_ppc(const PpcArgs& a) {
  json bundle = load_bundle(a.in);
  const FunctionalSample centered = sample_from_json(bundle.at("curves"), nullptr);
  const FpcaResult full = fpca_from_bundle(bundle, centered);
  const int m = bundle.at("fpca").at("m").get<int>();
  const FpcaResult trunc = truncate(full, TruncationRule::by_count(m));
  const PeriodicSubBasis sub = periodic_sub_basis(centered.basis, a.years, a.p);
  const PpcResult rot = ppc_rotation(trunc, sub);
  const VarianceDecomposition vd = variance_decomposition(centered, trunc, rot);
  const AiDiagnostic ai = annual_information(vd);

  bundle["ppc"] = {
      {"years", a.years},
      {"p", a.p},
      {"rho", vec_to_json(rot.correlations)},
      {"ppcs", mat_to_json(rot.ppcs)},
      {"benchmarks", mat_to_json(rot.benchmarks)},
      {"u_hat", mat_to_json(rot.u_hat)},
      {"v_hat", mat_to_json(rot.v_hat)},
      {"ai", ai.ai},
      {"suggested_j", ai.suggested_j},
      {"variance_decomposition",
       {{"lambda_gamma", vec_to_json(vd.lambda_gamma)},
        {"lambda_xi", vec_to_json(vd.lambda_xi)},
        {"lambda_theta", vec_to_json(vd.lambda_theta)},
        {"cum_gamma", vec_to_json(vd.cum_gamma)},
        {"cum_xi", vec_to_json(vd.cum_xi)},
        {"cum_theta", vec_to_json(vd.cum_theta)}}}};
  save_bundle(a.out.empty() ? a.in : a.out, bundle);
  return 0;
}

struct DecomposeArgs {
  std::string in, prefix;
  int j = 1;
};

int run_decompose(const DecomposeArgs& a) {
  const json bundle = load_bundle(a.in);
  std::vector<std::string> ids;
  const FunctionalSample centered = sample_from_json(bundle.at("curves"), &ids);
  const FpcaResult full = fpca_from_bundle(bundle, centered);
  if (!bundle.contains("ppc"))
    throw parse_error("bundle has no ppc section; run `ppc` first");
  const json& p = bundle.at("ppc");
  PpcResult rot;
  rot.ppcs = mat_from_json(p.at("ppcs"));
  rot.benchmarks = mat_from_json(p.at("benchmarks"));
  rot.correlations = vec_from_json(p.at("rho"));
  rot.n_pairs = static_cast<int>(rot.correlations.size());

  const Decomposition d = decompose(centered, rot, full, a.j);
  if (ids.empty())
    for (int i = 0; i < centered.n_curves(); ++i)
      ids.push_back("curve_" + std::to_string(i));
  write_coefficient_csv(a.prefix + ".nearly_periodic.csv", ids, d.nearly_periodic);
  write_coefficient_csv(a.prefix + ".aperiodic.csv", ids, d.aperiodic);
  write_coefficient_csv(a.prefix + ".remainder.csv", ids, d.remainder);
  return 0;
}

struct TestArgs {
  std::string in, out, hist;
  std::string null_kind = "replace";
  int b = 500;
  std::uint64_t seed = 0;
  double lambda_penalty = 1e4;
  int years = 1;
  int p = 2;
  int nbasis = 0;
  double t = 0.0;
  std::string truncate_spec = "frac:0.8";
  std::string lambda_grid = "default";
};

int run_test(const TestArgs& a) {
  const RawCurveSet raw = read_curve_csv(a.in);
  TestConfig cfg;
  cfg.time_span = a.t;
  cfg.n_basis = a.nbasis;
  cfg.lambda_grid = parse_lambda_grid(a.lambda_grid);
  cfg.rule = parse_truncation(a.truncate_spec);
  cfg.years = a.years;
  cfg.p = a.p;
  cfg.b = a.b;
  cfg.seed = a.seed;
  cfg.lambda_penalty = a.lambda_penalty;
  if (a.null_kind == "replace")
    cfg.null_kind = NullConstruction::Kind::Replacement;
  else if (a.null_kind == "inflate")
    cfg.null_kind = NullConstruction::Kind::Inflation;
  else
    throw CLI::ValidationError("--null", "expected replace or inflate");

  const PeriodicityTestResult res = bootstrap_test(raw, cfg);
  json out = {
      {"schema_version", kSchemaVersion},
      {"config",
       {{"command", "test"},
        {"in", a.in},
        {"null", a.null_kind},
        {"b", a.b},
        {"seed", a.seed},
        {"years", a.years},
        {"p", a.p},
        {"lambda_penalty", a.lambda_penalty},
        {"truncate", a.truncate_spec}}},
      {"test",
       {{"observed_rho1", res.observed_rho1},
        {"null_achieved_rho1", res.null_achieved_rho1},
        {"p_value", res.p_value},
        {"b", res.b},
        {"seed", res.seed},
        {"bootstrap_rho1", res.bootstrap_rho1}}}};
  save_bundle(a.out, out);
  if (!a.hist.empty()) {
    std::ofstream csv(a.hist);
    if (!csv) throw parse_error("cannot write: " + a.hist);
    csv << "replicate,rho1\n";
    for (std::size_t i = 0; i < res.bootstrap_rho1.size(); ++i)
      csv << i + 1 << "," << format_double(res.bootstrap_rho1[i]) << "\n";
  }
  return 0;
}

struct StabilityArgs {
  std::string in, out;
  std::string m_list = "5:50:5";
  int years = 1;
  int p = 2;
  int nbasis = 0;
  double t = 0.0;
  std::string lambda_grid = "default";
  int grid = 201;
};

int run_stability(const StabilityArgs& a) {
  const RawCurveSet raw = read_curve_csv(a.in);
  raw.validate();
  const double span = a.t > 0.0 ? a.t : infer_span(raw);
  const int nbasis = a.nbasis > 0 ? a.nbasis : raw.n_points() - 1;
  const FourierBasis basis = make_basis(span, nbasis, true);
  const SmoothingFit fit = smooth(raw, basis, parse_lambda_grid(a.lambda_grid));
  const FunctionalSample centered =
      center_crosssection(demean_timeseries(fit.sample));
  const FpcaResult full = fpca(centered);
  const PeriodicSubBasis sub = periodic_sub_basis(basis, a.years, a.p);
  const StabilityTrace trace = stability_trace(
      full, sub, parse_m_list(a.m_list), uniform_grid(span, a.grid));

  std::ofstream csv(a.out);
  if (!csv) throw parse_error("cannot write: " + a.out);
  csv << "m_upper,ppc,varimax_max_variance,varimax_closest_previous,"
         "varimax_closest_first_fpc\n";
  for (std::size_t i = 0; i < trace.m_upper.size(); ++i)
    csv << trace.m_upper[i] << "," << format_double(trace.ppc_trace[i]) << ","
        << format_double(trace.varimax_max_variance[i]) << ","
        << format_double(trace.varimax_closest_previous[i]) << ","
        << format_double(trace.varimax_closest_first_fpc[i]) << "\n";
  return 0;
}

struct PlotArgs {
  std::string in, out, what, svg;
  int grid = 201;
};

// Tidy series rows: (x, series, y).
struct SeriesPoint {
  double x;
  std::string series;
  double y;
};

std::vector<SeriesPoint> plot_rows(const json& bundle, const PlotArgs& a) {
  std::vector<SeriesPoint> rows;
  if (a.what == "scree") {
    const Eigen::VectorXd ev = vec_from_json(bundle.at("fpca").at("eigenvalues"));
    for (Eigen::Index j = 0; j < ev.size(); ++j)
      rows.push_back({static_cast<double>(j + 1), "eigenvalue", ev[j]});
  } else if (a.what == "ai") {
    for (std::size_t j = 0; j < bundle.at("ppc").at("ai").size(); ++j)
      rows.push_back({static_cast<double>(j + 1), "ai",
                      bundle.at("ppc").at("ai")[j].get<double>()});
  } else if (a.what == "correlations") {
    const Eigen::VectorXd rho = vec_from_json(bundle.at("ppc").at("rho"));
    for (Eigen::Index j = 0; j < rho.size(); ++j)
      rows.push_back({static_cast<double>(j + 1), "rho", rho[j]});
  } else if (a.what == "components") {
    const FunctionalSample centered =
        sample_from_json(bundle.at("curves"), nullptr);
    const Eigen::MatrixXd ppcs = mat_from_json(bundle.at("ppc").at("ppcs"));
    const Eigen::MatrixXd bench =
        mat_from_json(bundle.at("ppc").at("benchmarks"));
    const Eigen::VectorXd t = uniform_grid(centered.basis.time_span(), a.grid);
    const Eigen::MatrixXd phi = centered.basis.eval_matrix(t);
    const Eigen::MatrixXd pv = ppcs * phi.transpose();
    const Eigen::MatrixXd bv = bench * phi.transpose();
    for (Eigen::Index i = 0; i < pv.rows(); ++i)
      for (Eigen::Index j = 0; j < t.size(); ++j)
        rows.push_back({t[j], "ppc" + std::to_string(i + 1), pv(i, j)});
    for (Eigen::Index i = 0; i < bv.rows(); ++i)
      for (Eigen::Index j = 0; j < t.size(); ++j)
        rows.push_back({t[j], "benchmark" + std::to_string(i + 1), bv(i, j)});
  } else if (a.what == "cumvar") {
    const json& vd = bundle.at("ppc").at("variance_decomposition");
    auto emit = [&](const char* key, const char* name) {
      const Eigen::VectorXd c = vec_from_json(vd.at(key));
      for (Eigen::Index j = 0; j < c.size(); ++j)
        rows.push_back({static_cast<double>(j + 1), name, c[j]});
    };
    emit("cum_gamma", "fpc");
    emit("cum_xi", "ppc");
    emit("cum_theta", "benchmark");
    if (bundle.contains("varimax")) {
      const Eigen::VectorXd ev =
          vec_from_json(bundle.at("varimax").at("explained_variance"));
      double acc = 0.0;
      for (Eigen::Index j = 0; j < ev.size(); ++j)
        rows.push_back({static_cast<double>(j + 1), "varimax", acc += ev[j]});
    }
  } else {
    throw CLI::ValidationError("--what", "unknown plot kind: " + a.what);
  }
  return rows;
}

void write_svg(const std::string& path, const std::vector<SeriesPoint>& rows) {
  // one polyline per series in a fixed 800x500 viewport
  const double w = 800, h = 500, ml = 60, mr = 20, mt = 20, mb = 40;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& r : rows) {
    if (!std::isfinite(r.y)) continue;
    xmin = std::min(xmin, r.x);
    xmax = std::max(xmax, r.x);
    ymin = std::min(ymin, r.y);
    ymax = std::max(ymax, r.y);
  }
  if (xmax <= xmin) xmax = xmin + 1.0;
  if (ymax <= ymin) ymax = ymin + 1.0;
  auto sx = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
  auto sy = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };

  std::vector<std::string> order;
  for (const auto& r : rows) {
    bool seen = false;
    for (const auto& s : order) seen |= (s == r.series);
    if (!seen) order.push_back(r.series);
  }
  const char* palette[] = {"#1b6ca8", "#c0392b", "#27ae60", "#8e44ad",
                           "#d35400", "#16a085", "#7f8c8d", "#2c3e50"};

  std::ofstream out(path);
  if (!out) throw parse_error("cannot write: " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n"
      << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr
      << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << h - mb << "\" stroke=\"black\"/>\n";
  for (std::size_t s = 0; s < order.size(); ++s) {
    out << "<polyline fill=\"none\" stroke=\"" << palette[s % 8]
        << "\" stroke-width=\"1.5\" points=\"";
    for (const auto& r : rows)
      if (r.series == order[s] && std::isfinite(r.y))
        out << sx(r.x) << "," << sy(r.y) << " ";
    out << "\"/>\n";
    out << "<text x=\"" << ml + 8 << "\" y=\"" << mt + 16 * (s + 1)
        << "\" fill=\"" << palette[s % 8] << "\" font-size=\"12\">" << order[s]
        << "</text>\n";
  }
  out << "</svg>\n";
}

int run_plotdata(const PlotArgs& a) {
  const json bundle = load_bundle(a.in);
  const std::vector<SeriesPoint> rows = plot_rows(bundle, a);
  std::ofstream csv(a.out);
  if (!csv) throw parse_error("cannot write: " + a.out);
  csv << "x,series,y\n";
  for (const auto& r : rows)
    csv << format_double(r.x) << "," << r.series << "," << format_double(r.y)
        << "\n";
  if (!a.svg.empty()) write_svg(a.svg, rows);
  return 0;
}

int error_out(const char* type, const std::string& message, int code) {
  std::cerr << json{{"error", {{"type", type}, {"message", message}}}}.dump()
            << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"principal periodic components toolkit"};
  app.require_subcommand(1);

  SimulateArgs sim;
  CLI::App* c_sim = app.add_subcommand("simulate", "generate synthetic curve sets");
  c_sim->add_option("--scheme", sim.scheme)->check(CLI::Range(1, 2));
  c_sim->add_option("--level", sim.level);
  c_sim->add_option("--n", sim.n);
  c_sim->add_option("--seed", sim.seed);
  c_sim->add_option("--t", sim.t);
  c_sim->add_option("--years", sim.years);
  c_sim->add_option("--hfd-freq", sim.hfd_freq);
  c_sim->add_option("--grid", sim.grid);
  c_sim->add_option("--noise", sim.noise);
  c_sim->add_option("--out", sim.out)->required();

  SmoothArgs smo;
  CLI::App* c_smo = app.add_subcommand("smooth", "penalized basis smoothing");
  c_smo->add_option("--in", smo.in)->required();
  c_smo->add_option("--out", smo.out)->required();
  c_smo->add_option("--coef-out", smo.coef_out);
  c_smo->add_option("--nbasis", smo.nbasis);
  c_smo->add_option("--t", smo.t);
  c_smo->add_option("--lambda-grid", smo.lambda_grid);

  FpcaArgs fpa;
  CLI::App* c_fpa = app.add_subcommand("fpca", "functional PCA of a bundle");
  c_fpa->add_option("--in", fpa.in)->required();
  c_fpa->add_option("--out", fpa.out);
  c_fpa->add_option("--truncate", fpa.truncate_spec);

  VarimaxArgs vma;
  CLI::App* c_vma = app.add_subcommand("varimax", "VARIMAX rotation");
  c_vma->add_option("--in", vma.in)->required();
  c_vma->add_option("--out", vma.out);
  c_vma->add_option("--m", vma.m);
  c_vma->add_option("--grid", vma.grid);

  PpcArgs ppa;
  CLI::App* c_ppa = app.add_subcommand("ppc", "rotation toward the periodic subspace");
  c_ppa->add_option("--in", ppa.in)->required();
  c_ppa->add_option("--out", ppa.out);
  c_ppa->add_option("--years", ppa.years)->required();
  c_ppa->add_option("--p", ppa.p);

  DecomposeArgs dec;
  CLI::App* c_dec = app.add_subcommand("decompose", "split curves into periodic parts");
  c_dec->add_option("--in", dec.in)->required();
  c_dec->add_option("--j", dec.j)->required();
  c_dec->add_option("--out", dec.prefix)->required();

  TestArgs tst;
  CLI::App* c_tst = app.add_subcommand("test", "bootstrap periodicity test");
  c_tst->add_option("--in", tst.in)->required();
  c_tst->add_option("--out", tst.out)->required();
  c_tst->add_option("--hist", tst.hist);
  c_tst->add_option("--null", tst.null_kind);
  c_tst->add_option("--b", tst.b);
  c_tst->add_option("--seed", tst.seed);
  c_tst->add_option("--lambda-penalty", tst.lambda_penalty);
  c_tst->add_option("--years", tst.years);
  c_tst->add_option("--p", tst.p);
  c_tst->add_option("--nbasis", tst.nbasis);
  c_tst->add_option("--t", tst.t);
  c_tst->add_option("--truncate", tst.truncate_spec);
  c_tst->add_option("--lambda-grid", tst.lambda_grid);

  StabilityArgs sta;
  CLI::App* c_sta = app.add_subcommand("stability", "leading-component stability trace");
  c_sta->add_option("--in", sta.in)->required();
  c_sta->add_option("--out", sta.out)->required();
  c_sta->add_option("--m-list", sta.m_list);
  c_sta->add_option("--years", sta.years);
  c_sta->add_option("--p", sta.p);
  c_sta->add_option("--nbasis", sta.nbasis);
  c_sta->add_option("--t", sta.t);
  c_sta->add_option("--lambda-grid", sta.lambda_grid);
  c_sta->add_option("--grid", sta.grid);

  PlotArgs plt;
  CLI::App* c_plt = app.add_subcommand("plotdata", "tidy CSV (and SVG) plot series");
  c_plt->add_option("--in", plt.in)->required();
  c_plt->add_option("--out", plt.out)->required();
  c_plt->add_option("--what", plt.what)->required();
  c_plt->add_option("--svg", plt.svg);
  c_plt->add_option("--grid", plt.grid);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    return error_out("usage", e.what(), 2);
  }

  try {
    if (c_sim->parsed()) return run_simulate(sim);
    if (c_smo->parsed()) return run_smooth(smo);
    if (c_fpa->parsed()) return run_fpca(fpa);
    if (c_vma->parsed()) return run_varimax(vma);
    if (c_ppa->parsed()) return run_ppc(ppa);
    if (c_dec->parsed()) return run_decompose(dec);
    if (c_tst->parsed()) return run_test(tst);
    if (c_sta->parsed()) return run_stability(sta);
    if (c_plt->parsed()) return run_plotdata(plt);
  } catch (const CLI::ValidationError& e) {
    return error_out("usage", e.what(), 2);
  } catch (const parse_error& e) {
    return error_out("parse", e.what(), 3);
  } catch (const incompatible_basis_error& e) {
    return error_out("incompatible_basis", e.what(), 3);
  } catch (const invalid_state_error& e) {
    return error_out("invalid_state", e.what(), 3);
  } catch (const insufficient_data_error& e) {
    return error_out("insufficient_data", e.what(), 3);
  } catch (const singular_system_error& e) {
    return error_out("singular_system", e.what(), 4);
  } catch (const numerical_error& e) {
    return error_out("numerical", e.what(), 4);
  } catch (const std::invalid_argument& e) {
    return error_out("invalid_argument", e.what(), 3);
  } catch (const std::out_of_range& e) {
    return error_out("out_of_range", e.what(), 3);
  } catch (const json::exception& e) {
    return error_out("parse", e.what(), 3);
  } catch (const std::exception& e) {
    return error_out("internal", e.what(), 4);
  }
  return 0;
}
