// Copyright 2026 The ssvkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ssvkit/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

namespace ssvkit::io {

namespace {

[[noreturn]] void parse_error(const std::string &msg) { fail(ErrorKind::Parse, msg); }

std::vector<std::string> split_csv_line(const std::string &line, std::size_t lineno) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) parse_error("unterminated quote on line " + std::to_string(lineno));
  out.push_back(std::move(field));
  return out;
}

std::string trim(const std::string &s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string csv_escape(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

const Json &require(const Json &j, const char *field) {
  if (!j.is_object() || !j.contains(field))
    parse_error(std::string("missing field '") + field + "'");
  return j.at(field);
}

} // namespace

int CsvTable::column(const std::string &name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

CsvTable parse_csv(const std::string &text) {
  CsvTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    auto fields = split_csv_line(line, lineno);
    for (auto &f : fields) f = trim(f);
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size())
      parse_error("line " + std::to_string(lineno) + " has " + std::to_string(fields.size()) +
                  " fields, header has " + std::to_string(table.header.size()));
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) parse_error("CSV input is empty");
  return table;
}

std::string read_text(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) parse_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidArgument, "cannot write '" + path + "'");
  out << content;
}

CsvTable read_csv(const std::string &path) { return parse_csv(read_text(path)); }

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_cell(const CsvTable &table, std::size_t row, std::size_t col) {
  const std::string &s = table.rows[row][col];
  double v = 0.0;
  const char *first = s.data();
  const char *last = s.data() + s.size();
  if (!s.empty() && *first == '+') ++first;
  const auto res = std::from_chars(first, last, v);
  if (s.empty() || res.ec != std::errc() || res.ptr != last || !std::isfinite(v))
    parse_error("non-numeric value '" + s + "' at row " + std::to_string(row + 1) +
                ", column '" + table.header[col] + "'");
  return v;
}

Dataset dataset_from_csv(const CsvTable &table, const std::string &target) {
  const int t = table.column(target);
  if (t < 0) parse_error("target column '" + target + "' not found");
  if (table.rows.empty()) parse_error("dataset has no rows");
  Dataset data;
  const std::size_t cols = table.header.size();
  data.X.resize(static_cast<Eigen::Index>(table.rows.size()), static_cast<Eigen::Index>(cols - 1));
  data.y.resize(static_cast<Eigen::Index>(table.rows.size()));
  for (std::size_t c = 0; c < cols; ++c)
    if (static_cast<int>(c) != t) data.feature_names.push_back(table.header[c]);
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    Eigen::Index f = 0;
    for (std::size_t c = 0; c < cols; ++c) {
      const double v = parse_cell(table, r, c);
      if (static_cast<int>(c) == t) data.y[static_cast<Eigen::Index>(r)] = v;
      else data.X(static_cast<Eigen::Index>(r), f++) = v;
    }
  }
  if (data.X.cols() < 1) parse_error("dataset has no feature columns");
  return data;
}

Matrix instances_from_csv(const CsvTable &table,
                          const std::vector<std::string> &feature_names, int dim) {
  std::vector<std::size_t> cols;
  bool by_name = !feature_names.empty();
  for (const auto &name : feature_names) {
    const int c = table.column(name);
    if (c < 0) {
      by_name = false;
      break;
    }
    cols.push_back(static_cast<std::size_t>(c));
  }
  if (!by_name) {
    if (static_cast<int>(table.header.size()) != dim)
      fail(ErrorKind::DimensionMismatch,
           "instances have " + std::to_string(table.header.size()) +
               " columns but the model expects " + std::to_string(dim));
    cols.clear();
    for (int c = 0; c < dim; ++c) cols.push_back(static_cast<std::size_t>(c));
  }
  Matrix X(static_cast<Eigen::Index>(table.rows.size()), dim);
  for (std::size_t r = 0; r < table.rows.size(); ++r)
    for (int c = 0; c < dim; ++c)
      X(static_cast<Eigen::Index>(r), c) = parse_cell(table, r, cols[static_cast<std::size_t>(c)]);
  return X;
}

Json matrix_to_json(const Matrix &m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json &j, const char *field) {
  if (!j.is_array()) parse_error(std::string("field '") + field + "' must be a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json &row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      parse_error(std::string("field '") + field + "' has ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json &v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) parse_error(std::string("field '") + field + "' has non-numeric entries");
      m(r, c) = v.get<double>();
    }
  }
  return m;
}

Json vector_to_json(const Vector &v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from_json(const Json &j, const char *field) {
  if (!j.is_array()) parse_error(std::string("field '") + field + "' must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) parse_error(std::string("field '") + field + "' has non-numeric entries");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Json posterior_to_json(const GPPosterior &posterior,
                       const std::vector<std::string> &feature_names) {
  Json j;
  j["inducing_points"] = matrix_to_json(posterior.inducing_points);
  j["mean_at_inducing"] = vector_to_json(posterior.mean_at_inducing);
  j["cov_at_inducing"] = matrix_to_json(posterior.cov_at_inducing);
  j["kernel"] = {{"variance", posterior.kernel.variance},
                 {"lengthscales", vector_to_json(posterior.kernel.lengthscales)}};
  j["noise"] = posterior.noise;
  if (!feature_names.empty()) j["feature_names"] = feature_names;
  return j;
}

GPPosterior posterior_from_json(const Json &j, std::vector<std::string> *feature_names) {
  GPPosterior p;
  p.inducing_points = matrix_from_json(require(j, "inducing_points"), "inducing_points");
  p.mean_at_inducing = vector_from_json(require(j, "mean_at_inducing"), "mean_at_inducing");
  p.cov_at_inducing = matrix_from_json(require(j, "cov_at_inducing"), "cov_at_inducing");
  const Json &k = require(j, "kernel");
  if (!require(k, "variance").is_number()) parse_error("kernel.variance must be a number");
  p.kernel.variance = k.at("variance").get<double>();
  p.kernel.lengthscales = vector_from_json(require(k, "lengthscales"), "lengthscales");
  if (!require(j, "noise").is_number()) parse_error("noise must be a number");
  p.noise = j.at("noise").get<double>();
  p.kernel.validate();
  const Eigen::Index nI = p.inducing_points.rows();
  if (p.inducing_points.cols() != p.kernel.dim() || p.mean_at_inducing.size() != nI ||
      p.cov_at_inducing.rows() != nI || p.cov_at_inducing.cols() != nI)
    fail(ErrorKind::DimensionMismatch, "posterior fields have inconsistent shapes");
  if (feature_names) {
    feature_names->clear();
    if (j.contains("feature_names"))
      *feature_names = j.at("feature_names").get<std::vector<std::string>>();
  }
  return p;
}

Json design_to_json(const CoalitionDesign &design) {
  Json j;
  j["d"] = design.d;
  j["masks"] = design.masks;
  j["weights"] = vector_to_json(design.weights);
  Json a = Json::array();
  for (Eigen::Index i = 0; i < design.A.rows(); ++i)
    for (Eigen::Index c = 0; c < design.A.cols(); ++c) a.push_back(design.A(i, c));
  j["A"] = std::move(a);
  j["digest"] = design.digest();
  return j;
}

CoalitionDesign design_from_json(const Json &j) {
  const int d = require(j, "d").get<int>();
  const auto masks = require(j, "masks").get<std::vector<FeatureSubset::Mask>>();
  const Vector weights = vector_from_json(require(j, "weights"), "weights");
  if (static_cast<std::size_t>(weights.size()) != masks.size())
    parse_error("design weights and masks differ in length");
  // Recover multiplicities from the stored weights.
  std::vector<double> mult(masks.size(), 1.0);
  const FeatureSubset::Mask full = FeatureSubset::full(d).mask();
  for (std::size_t i = 0; i < masks.size(); ++i)
    if (masks[i] != 0u && masks[i] != full)
      mult[i] = weights[static_cast<Eigen::Index>(i)] /
                coalition::shapley_kernel_weight(d, std::popcount(masks[i]));
  CoalitionDesign design = coalition::make_design(d, masks, mult);
  if (j.contains("A")) {
    const Vector a = vector_from_json(j.at("A"), "A");
    if (a.size() != design.A.size()) parse_error("stored projection has the wrong size");
    Matrix stored(design.A.rows(), design.A.cols());
    for (Eigen::Index i = 0; i < stored.rows(); ++i)
      for (Eigen::Index c = 0; c < stored.cols(); ++c) stored(i, c) = a[i * stored.cols() + c];
    const double scale = std::max(1.0, design.A.cwiseAbs().maxCoeff());
    if ((stored - design.A).cwiseAbs().maxCoeff() > 1e-9 * scale)
      parse_error("stored projection does not match the coalitions");
    design.A = stored;
  }
  return design;
}

ExplanationTable make_table(const ExplanationBatch &batch, const Matrix &instances,
                            const std::vector<std::string> &feature_names,
                            std::optional<double> credible_level) {
  ExplanationTable t;
  t.feature_names = feature_names.empty() ? default_feature_names(batch.dim()) : feature_names;
  t.instances = instances;
  t.means = batch.means;
  for (Eigen::Index k = 0; k < batch.num_instances(); ++k) t.cov.push_back(batch.cov(k));
  t.sigma2 = batch.sigma2;
  t.algorithm = batch.algorithm;
  t.design_digest = batch.design_digest;
  if (credible_level) {
    t.credible_level = credible_level;
    t.intervals = explain::credible_intervals(batch, *credible_level);
  }
  return t;
}

Json table_to_json(const ExplanationTable &t) {
  Json j;
  j["algorithm"] = t.algorithm;
  j["feature_names"] = t.feature_names;
  j["instances"] = matrix_to_json(t.instances);
  j["means"] = matrix_to_json(t.means);
  if (!t.cov.empty()) {
    Json cov = Json::array();
    for (const auto &c : t.cov) cov.push_back(matrix_to_json(c));
    j["cov"] = std::move(cov);
  }
  if (t.sigma2) j["sigma2"] = vector_to_json(*t.sigma2);
  j["design_digest"] = t.design_digest;
  if (t.intervals) {
    j["credible"] = {{"level", *t.credible_level},
                     {"lo", matrix_to_json(t.intervals->lo)},
                     {"hi", matrix_to_json(t.intervals->hi)}};
  }
  return j;
}

ExplanationTable table_from_json(const Json &j) {
  ExplanationTable t;
  t.means = matrix_from_json(require(j, "means"), "means");
  t.instances = matrix_from_json(require(j, "instances"), "instances");
  if (t.means.rows() != t.instances.rows() || t.means.cols() != t.instances.cols())
    fail(ErrorKind::DimensionMismatch, "instances and means differ in shape");
  const int d = static_cast<int>(t.means.cols());
  t.feature_names = j.contains("feature_names")
                        ? j.at("feature_names").get<std::vector<std::string>>()
                        : default_feature_names(d);
  if (static_cast<int>(t.feature_names.size()) != d)
    fail(ErrorKind::DimensionMismatch, "feature_names length differs from d");
  if (j.contains("cov")) {
    for (const auto &c : j.at("cov")) {
      t.cov.push_back(matrix_from_json(c, "cov"));
      if (t.cov.back().rows() != d || t.cov.back().cols() != d)
        fail(ErrorKind::DimensionMismatch, "cov blocks must be d x d");
    }
    if (static_cast<Eigen::Index>(t.cov.size()) != t.means.rows())
      fail(ErrorKind::DimensionMismatch, "one cov block per instance is required");
  }
  if (j.contains("sigma2")) t.sigma2 = vector_from_json(j.at("sigma2"), "sigma2");
  t.algorithm = j.value("algorithm", std::string{});
  t.design_digest = j.value("design_digest", std::string{});
  if (j.contains("credible")) {
    const auto &c = j.at("credible");
    t.credible_level = require(c, "level").get<double>();
    t.intervals = CredibleIntervals{matrix_from_json(require(c, "lo"), "credible.lo"),
                                    matrix_from_json(require(c, "hi"), "credible.hi")};
    if (t.intervals->lo.rows() != t.means.rows() || t.intervals->lo.cols() != d ||
        t.intervals->hi.rows() != t.means.rows() || t.intervals->hi.cols() != d)
      fail(ErrorKind::DimensionMismatch, "credible bounds must be n x d");
  }
  return t;
}

std::string table_to_csv(const ExplanationTable &t) {
  std::ostringstream out;
  out << "instance,feature,x,mean,sd";
  if (t.intervals) out << ",lo,hi";
  out << '\n';
  for (Eigen::Index k = 0; k < t.means.rows(); ++k) {
    for (Eigen::Index i = 0; i < t.means.cols(); ++i) {
      const double var = t.cov.empty() ? 0.0 : t.cov[static_cast<std::size_t>(k)](i, i);
      out << k << ',' << csv_escape(t.feature_names[static_cast<std::size_t>(i)]) << ','
          << format_double(t.instances(k, i)) << ',' << format_double(t.means(k, i)) << ','
          << format_double(std::sqrt(std::max(var, 0.0)));
      if (t.intervals)
        out << ',' << format_double(t.intervals->lo(k, i)) << ','
            << format_double(t.intervals->hi(k, i));
      out << '\n';
    }
  }
  return out.str();
}

std::vector<std::string> default_feature_names(int d) {
  std::vector<std::string> names;
  for (int i = 0; i < d; ++i) names.push_back("f" + std::to_string(i + 1));
  return names;
}

ExplanationDataset explanation_dataset_from_file(const std::string &path,
                                                 std::vector<std::string> *feature_names) {
  const std::string text = read_text(path);
  const auto first = text.find_first_not_of(" \t\r\n");
  ExplanationDataset data;
  std::vector<std::string> names;
  if (first != std::string::npos && text[first] == '{') {
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::exception &e) {
      parse_error("invalid JSON in '" + path + "': " + e.what());
    }
    const auto t = table_from_json(j);
    data = {t.instances, t.means};
    names = t.feature_names;
  } else {
    const CsvTable table = parse_csv(text);
    const int c_inst = table.column("instance"), c_feat = table.column("feature");
    const int c_x = table.column("x"), c_mean = table.column("mean");
    if (c_inst >= 0 && c_feat >= 0 && c_x >= 0 && c_mean >= 0) {
      std::map<std::string, int> feature_index;
      std::map<long, std::size_t> instance_index;
      std::vector<std::tuple<std::size_t, int, double, double>> cells;
      for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const long inst = static_cast<long>(parse_cell(table, r, static_cast<std::size_t>(c_inst)));
        const std::string &f = table.rows[r][static_cast<std::size_t>(c_feat)];
        if (!feature_index.count(f)) {
          feature_index[f] = static_cast<int>(names.size());
          names.push_back(f);
        }
        if (!instance_index.count(inst)) {
          const std::size_t next = instance_index.size();
          instance_index[inst] = next;
        }
        cells.emplace_back(instance_index[inst], feature_index[f],
                           parse_cell(table, r, static_cast<std::size_t>(c_x)),
                           parse_cell(table, r, static_cast<std::size_t>(c_mean)));
      }
      const auto n = static_cast<Eigen::Index>(instance_index.size());
      const auto d = static_cast<Eigen::Index>(names.size());
      if (static_cast<Eigen::Index>(cells.size()) != n * d)
        parse_error("long-format explanations must list every feature for every instance");
      data.X = Matrix::Zero(n, d);
      data.Phi = Matrix::Zero(n, d);
      for (const auto &[k, i, x, m] : cells) {
        data.X(static_cast<Eigen::Index>(k), i) = x;
        data.Phi(static_cast<Eigen::Index>(k), i) = m;
      }
    } else {
      std::vector<std::size_t> xs, phis;
      for (int i = 1;; ++i) {
        const int cx = table.column("x_" + std::to_string(i));
        const int cp = table.column("phi_" + std::to_string(i));
        if (cx < 0 && cp < 0) break;
        if (cx < 0 || cp < 0)
          parse_error("explanation CSV needs matching x_" + std::to_string(i) + " and phi_" +
                      std::to_string(i) + " columns");
        xs.push_back(static_cast<std::size_t>(cx));
        phis.push_back(static_cast<std::size_t>(cp));
      }
      if (xs.empty())
        parse_error("explanation CSV needs columns instance,feature,x,mean or x_1..x_d,phi_1..phi_d");
      const auto n = static_cast<Eigen::Index>(table.rows.size());
      const auto d = static_cast<Eigen::Index>(xs.size());
      data.X.resize(n, d);
      data.Phi.resize(n, d);
      for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index i = 0; i < d; ++i) {
          data.X(r, i) = parse_cell(table, static_cast<std::size_t>(r), xs[static_cast<std::size_t>(i)]);
          data.Phi(r, i) = parse_cell(table, static_cast<std::size_t>(r), phis[static_cast<std::size_t>(i)]);
        }
      names = default_feature_names(static_cast<int>(d));
    }
  }
  data.validate();
  if (feature_names) *feature_names = std::move(names);
  return data;
}

} // namespace ssvkit::io
