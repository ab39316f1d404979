#pragma once

// JSON (de)serialization of state ensembles and Choi channels. The file
// format uses explicit [re, im] pairs for every complex number:
//   { "dim": 2,
//     "states": [ {"amplitudes": [[re, im], ...]} |
//                 {"matrix": [[[re, im], ...], ...]}, ... ],
//     "probs": [p0, p1, ...] }           // optional, default uniform
// Amplitude vectors are renormalized on load when within 1e-6 of unit norm,
// with a warning recorded; larger deviations are rejected.

#include <nlohmann/json.hpp>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "linalg.hpp"
#include "quantum.hpp"

namespace cohdual {

using Json = nlohmann::json;

struct LoadedEnsemble {
  StateEnsemble ensemble;
  std::vector<std::string> warnings;
};

namespace detail {

inline Complex parse_complex(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw std::invalid_argument(where + ": expected a [re, im] pair");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

inline Json dump_complex(Complex v) { return Json::array({v.real(), v.imag()}); }

}  // namespace detail

inline LoadedEnsemble parse_ensemble(const Json& file) {
  if (!file.is_object()) throw std::invalid_argument("ensemble file: expected a JSON object");
  if (!file.contains("dim") || !file["dim"].is_number_integer())
    throw std::invalid_argument("dim: missing or not an integer");
  const int d = file["dim"].get<int>();
  if (d < 1 || d > kMaxDim) throw std::invalid_argument("dim: out of range");
  if (!file.contains("states") || !file["states"].is_array() || file["states"].empty())
    throw std::invalid_argument("states: missing or empty");

  std::vector<std::string> warnings;
  std::vector<DensityMatrix> states;
  int index = 0;
  for (const Json& s : file["states"]) {
    const std::string where = "states[" + std::to_string(index) + "]";
    if (s.is_object() && s.contains("amplitudes")) {
      const Json& amp = s["amplitudes"];
      if (!amp.is_array() || static_cast<int>(amp.size()) != d)
        throw std::invalid_argument(where + ".amplitudes: expected " + std::to_string(d) +
                                    " entries");
      ComplexVector v(d);
      for (int i = 0; i < d; ++i)
        v(i) = detail::parse_complex(amp[i], where + ".amplitudes[" + std::to_string(i) + "]");
      const double norm = v.norm();
      if (std::abs(norm - 1.0) > 1e-6)
        throw std::invalid_argument(where + ".amplitudes: not normalized (norm " +
                                    std::to_string(norm) + ")");
      if (std::abs(norm - 1.0) > 1e-12) {
        warnings.push_back(where + ".amplitudes renormalized (norm deviation " +
                           std::to_string(std::abs(norm - 1.0)) + ")");
        v /= norm;
      }
      states.push_back(DensityMatrix::pure(PureState(v)));
    } else if (s.is_object() && s.contains("matrix")) {
      const Json& rows = s["matrix"];
      if (!rows.is_array() || static_cast<int>(rows.size()) != d)
        throw std::invalid_argument(where + ".matrix: expected " + std::to_string(d) + " rows");
      ComplexMatrix m(d, d);
      for (int r = 0; r < d; ++r) {
        if (!rows[r].is_array() || static_cast<int>(rows[r].size()) != d)
          throw std::invalid_argument(where + ".matrix[" + std::to_string(r) +
                                      "]: expected " + std::to_string(d) + " entries");
        for (int c = 0; c < d; ++c)
          m(r, c) = detail::parse_complex(rows[r][c], where + ".matrix[" + std::to_string(r) +
                                                          "][" + std::to_string(c) + "]");
      }
      try {
        states.push_back(DensityMatrix(std::move(m)));
      } catch (const std::invalid_argument& err) {
        throw std::invalid_argument(where + ".matrix: " + err.what());
      }
      index++;
      continue;
    } else {
      throw std::invalid_argument(where + ": expected an object with 'amplitudes' or 'matrix'");
    }
    index++;
  }

  std::vector<double> probs;
  if (file.contains("probs")) {
    const Json& p = file["probs"];
    if (!p.is_array() || p.size() != states.size())
      throw std::invalid_argument("probs: expected " + std::to_string(states.size()) +
                                  " entries");
    for (const Json& v : p) {
      if (!v.is_number()) throw std::invalid_argument("probs: entries must be numbers");
      probs.push_back(v.get<double>());
    }
  } else {
    probs.assign(states.size(), 1.0 / static_cast<double>(states.size()));
  }

  try {
    return {StateEnsemble(std::move(probs), std::move(states)), std::move(warnings)};
  } catch (const std::invalid_argument& err) {
    throw std::invalid_argument(std::string("probs: ") + err.what());
  }
}

inline LoadedEnsemble load_ensemble(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& err) {
    throw std::invalid_argument("JSON parse error in " + path + ": " + err.what());
  }
  return parse_ensemble(j);
}

/// Serialize as matrices (exact for mixed and pure states alike).
inline Json ensemble_to_json(const StateEnsemble& e) {
  Json file;
  file["dim"] = e.dim();
  file["probs"] = e.probs();
  Json states = Json::array();
  for (int j = 0; j < e.size(); ++j) {
    const ComplexMatrix& m = e.state(j).matrix();
    Json rows = Json::array();
    for (int r = 0; r < e.dim(); ++r) {
      Json row = Json::array();
      for (int c = 0; c < e.dim(); ++c) row.push_back(detail::dump_complex(m(r, c)));
      rows.push_back(std::move(row));
    }
    states.push_back(Json{{"matrix", std::move(rows)}});
  }
  file["states"] = std::move(states);
  return file;
}

inline Json channel_to_json(const QuantumChannel& n) {
  Json file;
  file["dim_in"] = n.dim_in();
  file["dim_out_b"] = n.dim_out_b();
  file["dim_out_aprime"] = n.dim_out_aprime();
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < n.choi().rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < n.choi().cols(); ++c)
      row.push_back(detail::dump_complex(n.choi()(r, c)));
    rows.push_back(std::move(row));
  }
  file["choi"] = std::move(rows);
  return file;
}

inline QuantumChannel channel_from_json(const Json& file) {
  for (const char* key : {"dim_in", "dim_out_b", "dim_out_aprime"})
    if (!file.contains(key) || !file[key].is_number_integer())
      throw std::invalid_argument(std::string(key) + ": missing or not an integer");
  const int din = file["dim_in"].get<int>();
  const int db = file["dim_out_b"].get<int>();
  const int da = file["dim_out_aprime"].get<int>();
  const Eigen::Index n = static_cast<Eigen::Index>(din) * db * da;
  if (!file.contains("choi") || !file["choi"].is_array() ||
      static_cast<Eigen::Index>(file["choi"].size()) != n)
    throw std::invalid_argument("choi: missing or wrong row count");
  ComplexMatrix j(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Json& row = file["choi"][r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw std::invalid_argument("choi: wrong column count in row " + std::to_string(r));
    for (Eigen::Index c = 0; c < n; ++c)
      j(r, c) = detail::parse_complex(row[c], "choi[" + std::to_string(r) + "][" +
                                                  std::to_string(c) + "]");
  }
  return QuantumChannel(din, db, da, std::move(j));
}

}  // namespace cohdual
