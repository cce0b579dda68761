#include "hfo/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "hfo/errors.hpp"

namespace hfo {

namespace {

constexpr int kStateColumns = 21;

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot open '" + path + "' for writing");
  os.precision(17);
  return os;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_number(const std::string& s, std::size_t line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("line " + std::to_string(line_no) + ": '" + s + "' is not a number");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string trajectory_csv_header() {
  std::string h = "t,j,case";
  for (int i = 1; i <= 6; ++i) h += ",x" + std::to_string(i);
  for (int i = 1; i <= 3; ++i) h += ",u" + std::to_string(i);
  for (int i = 1; i <= 6; ++i) h += ",ys" + std::to_string(i);
  for (int i = 1; i <= 3; ++i) h += ",z" + std::to_string(i);
  h += ",tau_c,tau_g,tau_d";
  return h;
}

void write_trajectory_csv(std::ostream& os, const HybridTrajectory& traj) {
  os << trajectory_csv_header() << '\n';
  for (const auto& s : traj.samples) {
    os << format_double(s.t) << ',' << s.j << ',';
    if (s.jump_case) os << to_string(*s.jump_case);
    const Vec21 v = s.state.to_vector();
    for (int i = 0; i < kStateColumns; ++i) os << ',' << format_double(v(i));
    os << '\n';
  }
}

void write_trajectory_csv(const std::string& path, const HybridTrajectory& traj) {
  auto os = open_out(path);
  write_trajectory_csv(os, traj);
}

HybridTrajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != trajectory_csv_header()) {
    throw ConfigError("trajectory CSV header mismatch");
  }
  HybridTrajectory traj;
  std::size_t line_no = 1;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != 3 + kStateColumns) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(3 + kStateColumns) + " columns");
    }
    TrajectorySample s;
    s.t = parse_number(cells[0], line_no);
    s.j = static_cast<int>(parse_number(cells[1], line_no));
    Vec21 v;
    for (int i = 0; i < kStateColumns; ++i) v(i) = parse_number(cells[3 + i], line_no);
    s.state = HybridState::from_vector(v);
    if (!cells[2].empty()) {
      s.jump_case = parse_jump_case(cells[2]);
      if (!s.jump_case) {
        throw ConfigError("line " + std::to_string(line_no) + ": unknown jump case '" +
                          cells[2] + "'");
      }
      if (traj.samples.empty()) {
        throw ConfigError("trajectory starts with a jump row");
      }
      const HybridState& prev = traj.samples.back().state;
      const JumpMap map =
          prev.tau_c == 0.0 && s.state.tau_c > 0.0 ? JumpMap::G2 : JumpMap::G1;
      traj.jumps.push_back({s.t, s.j, *s.jump_case, map});
    }
    traj.samples.push_back(s);
  }
  return traj;
}

HybridTrajectory read_trajectory_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open trajectory '" + path + "'");
  return read_trajectory_csv(is);
}

void write_bound_report_csv(std::ostream& os, const ErrorSeries& series,
                            const EnvelopeReport& report) {
  os << "t,err,prop_bound,thm_bound,margin\n";
  for (std::size_t i = 0; i < series.points.size(); ++i) {
    os << format_double(series.points[i].t) << ',' << format_double(series.points[i].err) << ','
       << format_double(report.prop[i]) << ',' << format_double(report.thm[i]) << ','
       << format_double(report.margins[i]) << '\n';
  }
}

void write_bound_report_csv(const std::string& path, const ErrorSeries& series,
                            const EnvelopeReport& report) {
  auto os = open_out(path);
  write_bound_report_csv(os, series, report);
}

}  // namespace hfo
