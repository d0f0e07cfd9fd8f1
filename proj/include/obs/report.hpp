#pragma once

#include "obs/dynamics.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace obs::report {

/// Shortest decimal form that round-trips (at most 17 significant digits).
std::string format_double(double x);

/// Throws obs::Error on I/O failure.
void write_file(const std::filesystem::path& path, const std::string& content);

/// Header T,N,P,ratio,remainder; one row per grid time.
std::string observability_csv(const dynamics::ObservabilityReport& r);

/// Log-log plot of |R(T)| and its envelope.
std::string remainder_svg(const dynamics::ObservabilityReport& r);

struct EigenRow {
  int level = 0;
  int k = 0;
  double lambda = 0.0;
  double residual = 0.0;
};

/// Header level,k,lambda,residual.
std::string eigen_csv(const std::vector<EigenRow>& rows);

/// Generic CSV from a header and numeric rows.
std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows);

}  // namespace obs::report
