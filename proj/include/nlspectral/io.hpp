#ifndef NLSPECTRAL_IO_HPP
#define NLSPECTRAL_IO_HPP

#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>

#include <json.hpp>

#include "nlspectral/analysis.hpp"
#include "nlspectral/assembler.hpp"

namespace nlspectral {

/// 17 significant digits; non-finite values as nan/inf.
inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline constexpr const char* kRecordCsvHeader =
    "N,M,delta,max_error,argmax_x,residual_inf,wall_ms";

/// wall_ms is written as 0 unless include_timing, so repeated runs are
/// byte-identical.
inline void write_records_csv(std::ostream& out, std::span<const ErrorRecord> records,
                              bool include_timing = false) {
  out << kRecordCsvHeader << '\n';
  for (const ErrorRecord& r : records) {
    out << r.order << ',' << r.quad_order << ',' << format_real(r.horizon) << ','
        << format_real(r.max_error) << ',' << format_real(r.argmax_x) << ','
        << format_real(r.residual_inf) << ',' << format_real(include_timing ? r.wall_ms : 0.0)
        << '\n';
  }
}

inline nlohmann::ordered_json record_to_json(const ErrorRecord& r, bool include_timing = false) {
  return {{"N", r.order},
          {"M", r.quad_order},
          {"delta", r.horizon},
          {"max_error", r.max_error},
          {"argmax_x", r.argmax_x},
          {"residual_inf", r.residual_inf},
          {"wall_ms", include_timing ? r.wall_ms : 0.0}};
}

inline nlohmann::ordered_json records_to_json(std::span<const ErrorRecord> records,
                                              bool include_timing = false) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const ErrorRecord& r : records) arr.push_back(record_to_json(r, include_timing));
  return arr;
}

/// Row-major CSV of a dense matrix, no header.
inline void write_matrix_csv(std::ostream& out, const DenseMatrix& a) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) {
      if (j) out << ',';
      out << format_real(a(i, j));
    }
    out << '\n';
  }
}

inline void write_vector_csv(std::ostream& out, std::span<const double> v) {
  for (double x : v) out << format_real(x) << '\n';
}

}  // namespace nlspectral

#endif  // NLSPECTRAL_IO_HPP
