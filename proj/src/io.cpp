#include "mbal/io.hpp"

#include <fstream>
#include <sstream>

namespace mbal {

namespace {

Complex complex_from_json(const Json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
    return {v[0].get<double>(), v[1].get<double>()};
  }
  throw Error(ErrorKind::Parse, "expected a number or a [re, im] pair, got " + v.dump());
}

const Json& require(const Json& doc, const char* key) {
  if (!doc.is_object() || !doc.contains(key)) throw Error(ErrorKind::Parse, std::string("missing field \"") + key + "\"");
  return doc.at(key);
}

double number(const Json& v, const char* what) {
  if (!v.is_number()) throw Error(ErrorKind::Parse, std::string(what) + " must be a number");
  return v.get<double>();
}

}  // namespace

AtomicMeasure measure_from_json(const Json& doc) {
  const Json& n_field = require(doc, "n");
  if (!n_field.is_number_integer() || n_field.get<long long>() < 0) {
    throw Error(ErrorKind::Parse, "\"n\" must be a non-negative integer");
  }
  const auto n = static_cast<Eigen::Index>(n_field.get<long long>());
  const Json& list = require(doc, "atoms");
  if (!list.is_array()) throw Error(ErrorKind::Parse, "\"atoms\" must be an array");

  std::vector<Atom> atoms;
  atoms.reserve(list.size());
  for (const Json& entry : list) {
    const Json& z = require(entry, "z");
    if (!z.is_array()) throw Error(ErrorKind::Parse, "\"z\" must be an array");
    if (static_cast<Eigen::Index>(z.size()) != n + 1) {
      throw Error(ErrorKind::InvalidMeasure, "atom has " + std::to_string(z.size()) + " coordinates, expected " +
                                                 std::to_string(n + 1));
    }
    CVector v(n + 1);
    for (Eigen::Index k = 0; k <= n; ++k) v(k) = complex_from_json(z[static_cast<std::size_t>(k)]);
    const double w = number(require(entry, "w"), "\"w\"");
    try {
      atoms.push_back(Atom{ProjectivePoint(std::move(v)), w});
    } catch (const Error& e) {
      throw Error(ErrorKind::InvalidMeasure, e.what());
    }
  }
  return AtomicMeasure(n, std::move(atoms));
}

Json measure_to_json(const AtomicMeasure& nu) {
  Json atoms = Json::array();
  for (const auto& atom : nu.atoms()) {
    Json z = Json::array();
    for (Eigen::Index k = 0; k < atom.point.ambient_dim(); ++k) {
      const Complex c = atom.point.coeffs()(k);
      z.push_back({c.real(), c.imag()});
    }
    atoms.push_back({{"z", std::move(z)}, {"w", atom.weight}});
  }
  return {{"n", nu.dim()}, {"atoms", std::move(atoms)}};
}

SphereMeasure sphere_from_json(const Json& doc) {
  const Json& list = require(doc, "atoms");
  if (!list.is_array()) throw Error(ErrorKind::Parse, "\"atoms\" must be an array");
  std::vector<SphereAtom> atoms;
  for (const Json& entry : list) {
    const Json& x = require(entry, "x");
    if (!x.is_array() || x.size() != 3) throw Error(ErrorKind::Parse, "\"x\" must be a 3-vector");
    atoms.push_back(SphereAtom{{number(x[0], "x"), number(x[1], "x"), number(x[2], "x")},
                               number(require(entry, "w"), "\"w\"")});
  }
  return SphereMeasure(std::move(atoms));
}

Json sphere_to_json(const SphereMeasure& sm) {
  Json atoms = Json::array();
  for (const auto& atom : sm.atoms()) {
    atoms.push_back({{"x", {atom.point.x(), atom.point.y(), atom.point.z()}}, {"w", atom.weight}});
  }
  return {{"atoms", std::move(atoms)}};
}

CMatrix matrix_from_json(const Json& doc) {
  if (!doc.is_array() || doc.empty()) throw Error(ErrorKind::Parse, "matrix must be a nonempty array of rows");
  const std::size_t rows = doc.size();
  if (!doc[0].is_array()) throw Error(ErrorKind::Parse, "matrix rows must be arrays");
  const std::size_t cols = doc[0].size();
  CMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < rows; ++r) {
    if (!doc[r].is_array() || doc[r].size() != cols) throw Error(ErrorKind::Parse, "matrix rows differ in length");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = complex_from_json(doc[r][c]);
    }
  }
  return m;
}

Json matrix_to_json(const CMatrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

Json real_vector_to_json(const RVector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return Json::parse(buffer.str());
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::Parse, path + ": " + e.what());
  }
}

}  // namespace mbal
