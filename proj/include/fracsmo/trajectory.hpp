#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace fracsmo {

/// One sample of a co-simulation. Everything refers to time t except
/// `flags`, which are the activation flags applied while advancing from this
/// sample to the next.
struct TrajectoryRow {
  double t = 0.0;
  std::vector<double> x;       // x_1..x_n
  std::vector<double> xhat;    // x̂_1..x̂_n
  std::vector<double> xtilde;  // x̃_2..x̃_n
  double f = 0.0;
  double fhat = 0.0;
  double ftilde = 0.0;
  double thetatilde = 0.0;
  std::vector<double> e;  // e_1..e_n
  double e_f = 0.0;
  std::vector<bool> flags;  // E_1..E_n

  bool operator==(const TrajectoryRow&) const = default;
};

struct Trajectory {
  std::size_t n = 0;
  std::vector<TrajectoryRow> rows;

  bool operator==(const Trajectory&) const = default;
};

/// t, x1..xn, xhat1..xhatn, xtilde2..xtilden, f, fhat, ftilde, thetatilde,
/// e1..en, ef, E1..En.
std::vector<std::string> csv_header(std::size_t n);

/// Numbers are written with 17 significant digits so reading them back is
/// exact.
void write_csv(std::ostream& out, const Trajectory& traj);
void write_csv_row(std::ostream& out, const TrajectoryRow& row);

/// Throws PreconditionError on a malformed file.
Trajectory read_csv(std::istream& in);

}  // namespace fracsmo
