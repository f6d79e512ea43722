#include "dnorm/doubly_stochastic.hpp"

#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace dnorm {

DoublyStochasticMatrix DoublyStochasticMatrix::validate(
    const std::vector<std::vector<double>>& rows, double tol) {
  const std::size_t d = rows.size();
  if (d == 0) throw std::invalid_argument("matrix must be nonempty");
  std::vector<double> flat;
  flat.reserve(d * d);
  for (std::size_t i = 0; i < d; ++i) {
    if (rows[i].size() != d) {
      throw std::invalid_argument("matrix row " + std::to_string(i) + " has " +
                                  std::to_string(rows[i].size()) + " entries, expected " +
                                  std::to_string(d));
    }
    for (std::size_t j = 0; j < d; ++j) {
      const double v = rows[i][j];
      if (!std::isfinite(v)) {
        throw std::invalid_argument("matrix entry (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") is not finite");
      }
      if (v < 0.0) {
        throw std::invalid_argument("matrix entry (" + std::to_string(i) + "," +
                                    std::to_string(j) + ") is negative");
      }
      flat.push_back(v);
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    double rs = 0.0;
    for (std::size_t j = 0; j < d; ++j) rs += flat[i * d + j];
    if (std::abs(rs - 1.0) > tol) {
      throw std::invalid_argument("matrix row " + std::to_string(i) + " sums to " +
                                  std::to_string(rs) + ", expected 1");
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    double cs = 0.0;
    for (std::size_t i = 0; i < d; ++i) cs += flat[i * d + j];
    if (std::abs(cs - 1.0) > tol) {
      throw std::invalid_argument("matrix column " + std::to_string(j) + " sums to " +
                                  std::to_string(cs) + ", expected 1");
    }
  }
  return DoublyStochasticMatrix(static_cast<int>(d), std::move(flat));
}

DoublyStochasticMatrix DoublyStochasticMatrix::identity(int d) {
  if (d < 1) throw std::invalid_argument("identity: d must be >= 1");
  std::vector<double> m(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) m[static_cast<std::size_t>(i) * d + i] = 1.0;
  return DoublyStochasticMatrix(d, std::move(m));
}

DoublyStochasticMatrix DoublyStochasticMatrix::uniform(int d) {
  if (d < 1) throw std::invalid_argument("uniform: d must be >= 1");
  std::vector<double> m(static_cast<std::size_t>(d) * d, 1.0 / d);
  return DoublyStochasticMatrix(d, std::move(m));
}

void DoublyStochasticMatrix::apply(std::span<const double> z, std::span<double> out) const {
  if (static_cast<int>(z.size()) != d_ || static_cast<int>(out.size()) != d_) {
    throw std::invalid_argument("matrix apply: dimension mismatch");
  }
  for (int i = 0; i < d_; ++i) {
    double acc = 0.0;
    const double* row = m_.data() + static_cast<std::size_t>(i) * d_;
    for (int j = 0; j < d_; ++j) acc += row[j] * z[j];
    out[i] = acc;
  }
}

namespace {

std::vector<double> multiply(const std::vector<double>& a, const std::vector<double>& b, int d) {
  std::vector<double> c(static_cast<std::size_t>(d) * d, 0.0);
  for (int i = 0; i < d; ++i) {
    for (int k = 0; k < d; ++k) {
      const double aik = a[static_cast<std::size_t>(i) * d + k];
      if (aik == 0.0) continue;
      for (int j = 0; j < d; ++j) {
        c[static_cast<std::size_t>(i) * d + j] += aik * b[static_cast<std::size_t>(k) * d + j];
      }
    }
  }
  return c;
}

std::vector<std::vector<double>> to_rows(const std::vector<double>& flat, int d) {
  std::vector<std::vector<double>> rows(d, std::vector<double>(d));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) rows[i][j] = flat[static_cast<std::size_t>(i) * d + j];
  }
  return rows;
}

}  // namespace

DoublyStochasticMatrix matrix_power(const DoublyStochasticMatrix& m, int n) {
  if (n < 0) throw std::invalid_argument("matrix_power: n must be >= 0");
  const int d = m.dim();
  std::vector<double> result = DoublyStochasticMatrix::identity(d).data();
  std::vector<double> base = m.data();
  int e = n;
  while (e > 0) {
    if (e & 1) result = multiply(result, base, d);
    e >>= 1;
    if (e > 0) base = multiply(base, base, d);
  }
  // Doubly stochastic matrices are closed under products; revalidate
  // with a loosened tolerance for the accumulated rounding.
  return DoublyStochasticMatrix::validate(to_rows(result, d), 1e-8);
}

PrimitivityResult is_primitive(const DoublyStochasticMatrix& m, double tol) {
  const int d = m.dim();
  // Work on the boolean adjacency pattern: primitivity only depends on
  // which entries are (structurally) positive, and boolean powers avoid
  // numeric underflow of long products.
  std::vector<char> adj(static_cast<std::size_t>(d) * d);
  for (int i = 0; i < d * d; ++i) adj[i] = m.data()[i] > tol ? 1 : 0;
  std::vector<char> power = adj;
  const int bound = (d - 1) * (d - 1) + 1;
  for (int n = 1; n <= bound; ++n) {
    bool all_positive = true;
    for (char v : power) {
      if (!v) {
        all_positive = false;
        break;
      }
    }
    if (all_positive) return {true, n};
    if (n == bound) break;
    std::vector<char> next(static_cast<std::size_t>(d) * d, 0);
    for (int i = 0; i < d; ++i) {
      for (int k = 0; k < d; ++k) {
        if (!power[static_cast<std::size_t>(i) * d + k]) continue;
        for (int j = 0; j < d; ++j) {
          if (adj[static_cast<std::size_t>(k) * d + j]) {
            next[static_cast<std::size_t>(i) * d + j] = 1;
          }
        }
      }
    }
    power = std::move(next);
  }
  return {false, 0};
}

std::vector<double> stationary_distribution(const DoublyStochasticMatrix& m) {
  const auto prim = is_primitive(m);
  if (!prim.primitive) {
    throw std::invalid_argument("stationary_distribution: matrix is not primitive");
  }
  const int d = m.dim();
  const std::vector<double> uniform(d, 1.0 / d);
  // mu M = mu for the uniform row vector.
  for (int j = 0; j < d; ++j) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) s += uniform[i] * m(i, j);
    if (std::abs(s - 1.0 / d) > 1e-10) {
      throw numerical_error("stationary_distribution: uniform vector fails mu M = mu");
    }
  }
  // Cross-check by power iteration from a deterministic non-uniform start.
  std::vector<double> v(d, 0.0), next(d, 0.0);
  v[0] = 1.0;
  for (int it = 0; it < 100000; ++it) {
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += v[i] * m(i, j);
      next[j] = s;
    }
    double delta = 0.0;
    for (int j = 0; j < d; ++j) delta = std::max(delta, std::abs(next[j] - v[j]));
    v.swap(next);
    if (delta < 1e-14) break;
  }
  for (int j = 0; j < d; ++j) {
    if (std::abs(v[j] - 1.0 / d) > 1e-8) {
      throw numerical_error("stationary_distribution: power iteration disagrees with uniform");
    }
  }
  return uniform;
}

double entrywise_l1_distance(const DoublyStochasticMatrix& m1, const DoublyStochasticMatrix& m2) {
  if (m1.dim() != m2.dim()) throw std::invalid_argument("matrix distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < m1.data().size(); ++i) s += std::abs(m1.data()[i] - m2.data()[i]);
  return s;
}

double continuity_bound(const DoublyStochasticMatrix& m1, const DoublyStochasticMatrix& m2,
                        double dist_ab) {
  if (!(dist_ab >= 0.0)) throw std::invalid_argument("continuity_bound: dist must be >= 0");
  return entrywise_l1_distance(m1, m2) + m1.dim() * dist_ab;
}

namespace {

DoublyStochasticMatrix parse_csv_matrix(const std::string& text, double tol) {
  std::vector<std::vector<double>> rows;
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    std::vector<double> row;
    std::istringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      const auto begin = field.find_first_not_of(" \t\r");
      const auto end = field.find_last_not_of(" \t\r");
      if (begin == std::string::npos) {
        throw std::invalid_argument("matrix CSV: empty entry");
      }
      const std::string trimmed = field.substr(begin, end - begin + 1);
      std::size_t pos = 0;
      double value = 0.0;
      try {
        value = std::stod(trimmed, &pos);
      } catch (const std::exception&) {
        throw std::invalid_argument("matrix CSV: cannot parse entry '" + field + "'");
      }
      if (pos != trimmed.size()) {
        throw std::invalid_argument("matrix CSV: trailing junk in entry '" + field + "'");
      }
      row.push_back(value);
    }
    rows.push_back(std::move(row));
  }
  return DoublyStochasticMatrix::validate(rows, tol);
}

}  // namespace

DoublyStochasticMatrix read_matrix(std::istream& in, double tol) {
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw std::invalid_argument("matrix input is empty");
  if (text[first] == '[') {
    nlohmann::json j = nlohmann::json::parse(text);
    std::vector<std::vector<double>> rows;
    for (const auto& r : j) rows.push_back(r.get<std::vector<double>>());
    return DoublyStochasticMatrix::validate(rows, tol);
  }
  return parse_csv_matrix(text, tol);
}

DoublyStochasticMatrix read_matrix_file(const std::string& path, double tol) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("cannot open matrix file: " + path);
  return read_matrix(f, tol);
}

}  // namespace dnorm
