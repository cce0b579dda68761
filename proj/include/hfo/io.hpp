#pragma once

#include <iosfwd>
#include <string>

#include "hfo/analysis.hpp"
#include "hfo/hybrid.hpp"

namespace hfo {

/// Header of the trajectory CSV.
std::string trajectory_csv_header();

/// One row per sample; the case column is empty on flow rows and holds
/// i/ii/iii on post-jump rows. Numbers use 17 significant digits so
/// re-reading reproduces the doubles exactly.
void write_trajectory_csv(std::ostream& os, const HybridTrajectory& traj);
void write_trajectory_csv(const std::string& path, const HybridTrajectory& traj);

/// Inverse of write_trajectory_csv. The map behind each jump row is
/// recovered from which timer was reset. Throws ConfigError on malformed
/// input.
HybridTrajectory read_trajectory_csv(std::istream& is);
HybridTrajectory read_trajectory_csv(const std::string& path);

/// t,err,prop_bound,thm_bound,margin
void write_bound_report_csv(std::ostream& os, const ErrorSeries& series,
                            const EnvelopeReport& report);
void write_bound_report_csv(const std::string& path, const ErrorSeries& series,
                            const EnvelopeReport& report);

/// %.17g
std::string format_double(double v);

}  // namespace hfo
