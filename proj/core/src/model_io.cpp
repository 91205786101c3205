#include "tapc/model_io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace tapc {
namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct LineReader {
  std::istream& is;
  int line_no = 0;

  // Next non-empty, non-comment line split into tokens; false at EOF.
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(is, line)) {
      ++line_no;
      if (line.empty() || line[0] == '#') continue;
      tokens.clear();
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) tokens.push_back(tok);
      if (!tokens.empty()) return true;
    }
    return false;
  }
};

double to_double(const std::string& tok, int line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError("bad number '" + tok + "'", line_no);
  return v;
}

int to_int(const std::string& tok, int line_no) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc{} || ptr != tok.data() + tok.size())
    throw ParseError("bad integer '" + tok + "'", line_no);
  return v;
}

}  // namespace

void save_scenario(std::ostream& os, const NetworkScenario& sc) {
  os << "# tapc scenario v1\n";
  os << "# units: bandwidth_hz Hz; noise_density_w_hz W/Hz; power_limit_w W;\n";
  os << "# demand_bps bit/s; gains are linear power ratios, one row per cell\n";
  os << "cells " << sc.cell_count() << "\n";
  os << "users " << sc.user_count() << "\n";
  os << "bandwidth_hz " << num(sc.bandwidth_hz) << "\n";
  os << "noise_density_w_hz " << num(sc.noise_density) << "\n";
  os << "power_limit_w";
  for (double p : sc.power_limit_w) os << ' ' << num(p);
  os << "\n";
  os << "association";
  for (int c : sc.cell_of) os << ' ' << c;
  os << "\n";
  os << "demand_bps";
  for (double d : sc.demand_bps) os << ' ' << num(d);
  os << "\n";
  os << "gains\n";
  for (const auto& row : sc.gain) {
    for (int j = 0; j < static_cast<int>(row.size()); ++j) os << (j ? " " : "") << num(row[j]);
    os << "\n";
  }
}

NetworkScenario load_scenario(std::istream& is) {
  LineReader rd{is};
  std::vector<std::string> t;
  NetworkScenario sc;
  int cells = -1;
  int users = -1;

  auto expect_counts = [&](const std::string& key) {
    if (cells < 0 || users < 0)
      throw ParseError("'" + key + "' before 'cells' and 'users'", rd.line_no);
  };

  while (rd.next(t)) {
    const std::string& key = t[0];
    const int argc = static_cast<int>(t.size()) - 1;
    if (key == "cells") {
      if (argc != 1) throw ParseError("'cells' takes one value", rd.line_no);
      cells = to_int(t[1], rd.line_no);
      if (cells < 1) throw ParseError("cells must be >= 1", rd.line_no);
    } else if (key == "users") {
      if (argc != 1) throw ParseError("'users' takes one value", rd.line_no);
      users = to_int(t[1], rd.line_no);
      if (users < 1) throw ParseError("users must be >= 1", rd.line_no);
    } else if (key == "bandwidth_hz") {
      if (argc != 1) throw ParseError("'bandwidth_hz' takes one value", rd.line_no);
      sc.bandwidth_hz = to_double(t[1], rd.line_no);
    } else if (key == "noise_density_w_hz") {
      if (argc != 1) throw ParseError("'noise_density_w_hz' takes one value", rd.line_no);
      sc.noise_density = to_double(t[1], rd.line_no);
    } else if (key == "power_limit_w") {
      expect_counts(key);
      if (argc != cells) throw ParseError("'power_limit_w' needs one value per cell", rd.line_no);
      sc.power_limit_w.clear();
      for (int i = 1; i <= argc; ++i) sc.power_limit_w.push_back(to_double(t[i], rd.line_no));
    } else if (key == "association") {
      expect_counts(key);
      if (argc != users) throw ParseError("'association' needs one value per user", rd.line_no);
      sc.cell_of.clear();
      sc.cell_users.assign(cells, {});
      for (int i = 1; i <= argc; ++i) {
        const int c = to_int(t[i], rd.line_no);
        if (c < 0 || c >= cells) throw ParseError("association cell out of range", rd.line_no);
        sc.cell_of.push_back(c);
        sc.cell_users[c].push_back(i - 1);
      }
    } else if (key == "demand_bps") {
      expect_counts(key);
      if (argc != users) throw ParseError("'demand_bps' needs one value per user", rd.line_no);
      sc.demand_bps.clear();
      for (int i = 1; i <= argc; ++i) sc.demand_bps.push_back(to_double(t[i], rd.line_no));
    } else if (key == "gains") {
      expect_counts(key);
      sc.gain.assign(cells, {});
      for (int c = 0; c < cells; ++c) {
        if (!rd.next(t)) throw ParseError("expected gain row " + std::to_string(c), rd.line_no);
        if (static_cast<int>(t.size()) != users)
          throw ParseError("gain row " + std::to_string(c) + " needs one value per user",
                           rd.line_no);
        for (const std::string& tok : t) sc.gain[c].push_back(to_double(tok, rd.line_no));
      }
    } else {
      throw ParseError("unknown key '" + key + "'", rd.line_no);
    }
  }

  if (cells < 0 || users < 0) throw ParseError("missing 'cells'/'users'", rd.line_no);
  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), rd.line_no);
  }
  return sc;
}

void save_scenario_file(const std::string& path, const NetworkScenario& sc) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  save_scenario(os, sc);
}

NetworkScenario load_scenario_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot read " + path);
  return load_scenario(is);
}

void save_allocation(std::ostream& os, const Allocation& alloc, const NetworkScenario& sc) {
  os << "# tapc allocation v1\n";
  os << "# columns: user cell load avg_power_w_hz serving_power_w_hz rate_bps demand_bps\n";
  os << "users " << sc.user_count() << "\n";
  for (int j = 0; j < sc.user_count(); ++j) {
    os << j << ' ' << sc.cell_of[j] << ' ' << num(alloc.load[j]) << ' '
       << num(alloc.avg_power[j]) << ' ' << num(alloc.serving_power(j)) << ' '
       << num(alloc.rate_bps[j]) << ' ' << num(sc.demand_bps[j]) << "\n";
  }
}

}  // namespace tapc
