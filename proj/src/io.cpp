#include "ppc/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "ppc/errors.hpp"

namespace ppc {

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_number(const std::string& field, int row, int col) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(field, &pos);
    if (pos != field.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw parse_error("malformed number at row " + std::to_string(row) +
                      ", column " + std::to_string(col) + ": '" + field + "'");
  }
}

}  // namespace

RawCurveSet read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw parse_error("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw parse_error(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line);
  if (header.size() < 2 || header[0] != "id")
    throw parse_error(path + ": header must start with 'id' followed by times");

  RawCurveSet raw;
  const int n = static_cast<int>(header.size()) - 1;
  raw.times.resize(n);
  for (int j = 0; j < n; ++j) raw.times[j] = parse_number(header[j + 1], 1, j + 2);
  for (int j = 1; j < n; ++j)
    if (!(raw.times[j] > raw.times[j - 1]))
      throw parse_error(path + ": header times not strictly increasing at column " +
                        std::to_string(j + 2));

  std::vector<std::vector<double>> rows;
  int row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_line(line);
    if (static_cast<int>(fields.size()) != n + 1)
      throw parse_error(path + ": row " + std::to_string(row_no) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(n + 1));
    raw.ids.push_back(fields[0]);
    std::vector<double> values(n);
    for (int j = 0; j < n; ++j)
      values[j] = parse_number(fields[j + 1], row_no, j + 2);
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw parse_error(path + ": no curves");

  raw.values.resize(static_cast<Eigen::Index>(rows.size()), n);
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < n; ++j) raw.values(static_cast<Eigen::Index>(i), j) = rows[i][j];
  return raw;
}

void write_curve_csv(const std::string& path, const RawCurveSet& raw) {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot write file: " + path);
  out << "id";
  for (Eigen::Index j = 0; j < raw.times.size(); ++j)
    out << ',' << format_double(raw.times[j]);
  out << '\n';
  for (int i = 0; i < raw.n_curves(); ++i) {
    out << (i < static_cast<int>(raw.ids.size()) ? raw.ids[i]
                                                 : "curve_" + std::to_string(i));
    for (int j = 0; j < raw.n_points(); ++j)
      out << ',' << format_double(raw.values(i, j));
    out << '\n';
  }
}

void write_coefficient_csv(const std::string& path,
                           const std::vector<std::string>& ids,
                           const Eigen::MatrixXd& coefficients) {
  std::ofstream out(path);
  if (!out) throw parse_error("cannot write file: " + path);
  out << "id";
  for (Eigen::Index j = 0; j < coefficients.cols(); ++j) out << ",c" << j;
  out << '\n';
  for (Eigen::Index i = 0; i < coefficients.rows(); ++i) {
    out << (i < static_cast<Eigen::Index>(ids.size())
                ? ids[i]
                : "curve_" + std::to_string(i));
    for (Eigen::Index j = 0; j < coefficients.cols(); ++j)
      out << ',' << format_double(coefficients(i, j));
    out << '\n';
  }
}

}  // namespace ppc
