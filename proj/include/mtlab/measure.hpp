#pragma once

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "mtlab/errors.hpp"

namespace mtlab {

// A finite measure space: weighted atoms, optionally carrying coordinates in
// R^n (quadrature grids) and cell geometry used when atomizing singular
// kernels.  Immutable after construction.
struct FiniteMeasureSpace {
  std::vector<std::string> ids;        // unique point identifiers
  std::vector<double> weights;         // strictly positive atom masses
  double total_mass = 0.0;

  int dim = 0;                         // 0 = abstract atomic space
  std::vector<double> coords;          // flattened, size() == dim * size

  // Grid metadata (empty for abstract spaces).  For 1-D grids [cell_lo,cell_hi]
  // bracket each cell; diag_radius is the equivalent-ball radius used to
  // average a singular kernel over its own cell.
  std::vector<double> cell_lo, cell_hi;
  std::vector<double> diag_radius;

  std::size_t size() const { return weights.size(); }

  const double* point(std::size_t i) const { return coords.data() + static_cast<std::size_t>(dim) * i; }

  void validate() const {
    if (weights.empty()) throw input_error("measure space: no atoms");
    double sum = 0.0;
    for (double w : weights) {
      if (!(w > 0.0) || !std::isfinite(w)) throw input_error("measure space: weights must be positive and finite");
      sum += w;
    }
    if (std::abs(sum - total_mass) > 1e-12 * static_cast<double>(weights.size()) * std::max(1.0, sum))
      throw input_error("measure space: total_mass does not match the sum of weights");
    if (!ids.empty()) {
      if (ids.size() != weights.size()) throw input_error("measure space: ids/weights size mismatch");
      std::unordered_set<std::string> seen;
      for (const auto& id : ids)
        if (!seen.insert(id).second) throw input_error("measure space: duplicate point id '" + id + "'");
    }
    if (dim > 0 && coords.size() != static_cast<std::size_t>(dim) * weights.size())
      throw input_error("measure space: coords size mismatch");
  }
};

inline FiniteMeasureSpace make_atomic_space(std::vector<double> weights,
                                            std::vector<std::string> ids = {}) {
  FiniteMeasureSpace s;
  s.weights = std::move(weights);
  if (ids.empty()) {
    s.ids.reserve(s.weights.size());
    for (std::size_t i = 0; i < s.weights.size(); ++i) s.ids.push_back("p" + std::to_string(i));
  } else {
    s.ids = std::move(ids);
  }
  double sum = 0.0;
  for (double w : s.weights) sum += w;
  s.total_mass = sum;
  s.validate();
  return s;
}

// CSV columns: id,weight[,x1..xn].  Header row required.
inline FiniteMeasureSpace load_space_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open measure-space file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw input_error("empty measure-space file: " + path);
  int ncols = 1;
  for (char c : line)
    if (c == ',') ++ncols;
  const int dim = ncols - 2;
  FiniteMeasureSpace s;
  s.dim = std::max(0, dim);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    if (!std::getline(ss, field, ',')) continue;
    s.ids.push_back(field);
    if (!std::getline(ss, field, ',')) throw input_error("missing weight in: " + line);
    try {
      s.weights.push_back(std::stod(field));
    } catch (...) {
      throw input_error("bad weight '" + field + "' in measure-space file");
    }
    for (int k = 0; k < s.dim; ++k) {
      if (!std::getline(ss, field, ',')) throw input_error("missing coordinate in: " + line);
      s.coords.push_back(std::stod(field));
    }
  }
  double sum = 0.0;
  for (double w : s.weights) sum += w;
  s.total_mass = sum;
  s.validate();
  return s;
}

inline void save_space_csv(const FiniteMeasureSpace& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw input_error("cannot write measure-space file: " + path);
  out << "id,weight";
  for (int k = 1; k <= s.dim; ++k) out << ",x" << k;
  out << "\n";
  out.precision(15);
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << (i < s.ids.size() ? s.ids[i] : "p" + std::to_string(i)) << "," << s.weights[i];
    for (int k = 0; k < s.dim; ++k) out << "," << s.coords[s.dim * i + k];
    out << "\n";
  }
}

}  // namespace mtlab
