#pragma once

#include <string>
#include <vector>

#include "ppc/sample.hpp"

namespace ppc {

// CurveMatrixFile: first row `id,t0,t1,...`; each further row a curve id
// followed by its values.  UTF-8, `.` decimal, comma separated.
RawCurveSet read_curve_csv(const std::string& path);
void write_curve_csv(const std::string& path, const RawCurveSet& raw);

// Coefficient matrices with an id column, same layout.
void write_coefficient_csv(const std::string& path,
                           const std::vector<std::string>& ids,
                           const Eigen::MatrixXd& coefficients);

std::string format_double(double value);  // 17 significant digits

}  // namespace ppc
