#include "fracsmo/trajectory.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "fracsmo/errors.hpp"

namespace fracsmo {

namespace {

void put(std::ostream& out, double v) {
  // Shortest form that reads back to the same double.
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, r.ptr - buf);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

double number(const std::string& cell, std::size_t line) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
    throw PreconditionError("CSV line " + std::to_string(line) + ": bad number '" + cell + "'");
  }
  return v;
}

}  // namespace

std::vector<std::string> csv_header(std::size_t n) {
  std::vector<std::string> h{"t"};
  for (std::size_t i = 1; i <= n; ++i) h.push_back("x" + std::to_string(i));
  for (std::size_t i = 1; i <= n; ++i) h.push_back("xhat" + std::to_string(i));
  for (std::size_t i = 2; i <= n; ++i) h.push_back("xtilde" + std::to_string(i));
  for (const char* s : {"f", "fhat", "ftilde", "thetatilde"}) h.emplace_back(s);
  for (std::size_t i = 1; i <= n; ++i) h.push_back("e" + std::to_string(i));
  h.emplace_back("ef");
  for (std::size_t i = 1; i <= n; ++i) h.push_back("E" + std::to_string(i));
  return h;
}

void write_csv_row(std::ostream& out, const TrajectoryRow& r) {
  put(out, r.t);
  auto list = [&](const std::vector<double>& v) {
    for (double x : v) {
      out << ',';
      put(out, x);
    }
  };
  list(r.x);
  list(r.xhat);
  list(r.xtilde);
  for (double v : {r.f, r.fhat, r.ftilde, r.thetatilde}) {
    out << ',';
    put(out, v);
  }
  list(r.e);
  out << ',';
  put(out, r.e_f);
  for (bool b : r.flags) out << ',' << (b ? '1' : '0');
  out << '\n';
}

void write_csv(std::ostream& out, const Trajectory& traj) {
  const auto header = csv_header(traj.n);
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : traj.rows) write_csv_row(out, row);
}

Trajectory read_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw PreconditionError("CSV is empty");
  const auto header = split(line);
  // time plus 5n + 4 columns
  if (header.size() < 15 || header.size() % 5 != 0) {
    throw PreconditionError("CSV header has an unexpected column count");
  }
  Trajectory traj;
  traj.n = header.size() / 5 - 1;
  if (header != csv_header(traj.n)) throw PreconditionError("CSV header does not match");

  const std::size_t n = traj.n;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw PreconditionError("CSV line " + std::to_string(lineno) + ": wrong column count");
    }
    std::size_t c = 0;
    auto next = [&] { return number(cells[c++], lineno); };
    auto take = [&](std::size_t count) {
      std::vector<double> v(count);
      for (auto& x : v) x = next();
      return v;
    };
    TrajectoryRow r;
    r.t = next();
    r.x = take(n);
    r.xhat = take(n);
    r.xtilde = take(n - 1);
    r.f = next();
    r.fhat = next();
    r.ftilde = next();
    r.thetatilde = next();
    r.e = take(n);
    r.e_f = next();
    for (std::size_t i = 0; i < n; ++i) {
      const auto& cell = cells[c++];
      if (cell != "0" && cell != "1") {
        throw PreconditionError("CSV line " + std::to_string(lineno) + ": flag must be 0 or 1");
      }
      r.flags.push_back(cell == "1");
    }
    traj.rows.push_back(std::move(r));
  }
  return traj;
}

}  // namespace fracsmo
