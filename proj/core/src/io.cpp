#include "anosov/io.hpp"

#include "anosov/errors.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace anosov::io {

using nlohmann::json;

namespace {

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), columns_(header.size()) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  stream_ = std::make_shared<std::ofstream>(path, std::ios::binary);
  if (!*stream_) throw Error(ErrorCode::InvalidConfig, "cannot write " + path.string());
  row(header);
}

std::ofstream* CsvWriter::out() { return stream_.get(); }

void CsvWriter::row(const std::vector<double>& values) {
  std::vector<std::string> cells;
  cells.reserve(values.size());
  for (double v : values) cells.push_back(number(v));
  row(cells);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_)
    throw Error(ErrorCode::InvalidConfig, "row width differs from header in " + path_.string());
  for (std::size_t i = 0; i < cells.size(); ++i) *out() << (i ? "," : "") << cells[i];
  *out() << '\n';
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidConfig, "cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string matrix_to_json(const LatticeAutomorphism& L) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i)
    rows.push_back({L.entries()(i, 0), L.entries()(i, 1), L.entries()(i, 2)});
  return rows.dump();
}

IMat3 integer_matrix_from_json(const std::string& text) {
  const json j = parse(text, "matrix");
  if (!j.is_array() || j.size() != 3)
    throw Error(ErrorCode::InvalidConfig, "matrix must be three integer rows");
  IMat3 M;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_array() || j[i].size() != 3)
      throw Error(ErrorCode::InvalidConfig, "matrix row must have three entries");
    for (int k = 0; k < 3; ++k) {
      if (!j[i][k].is_number_integer())
        throw Error(ErrorCode::InvalidConfig, "matrix entries must be integers");
      M(i, k) = j[i][k].get<std::int64_t>();
    }
  }
  return M;
}

LatticeAutomorphism matrix_from_json(const std::string& text) {
  return LatticeAutomorphism(integer_matrix_from_json(text));
}

std::string field_to_json(const TrigPolynomialField& u) {
  json arr = json::array();
  for (const TrigTerm& t : u.terms())
    arr.push_back({{"frequency", t.frequency},
                   {"coefficient", {t.coefficient[0], t.coefficient[1], t.coefficient[2]}},
                   {"phase", t.phase}});
  return arr.dump();
}

TrigPolynomialField field_from_json(const std::string& text) {
  const json j = parse(text, "perturbation");
  if (!j.is_array()) throw Error(ErrorCode::InvalidConfig, "perturbation must be a list of modes");
  std::vector<TrigTerm> terms;
  try {
    for (const json& m : j) {
      TrigTerm t;
      t.frequency = m.at("frequency").get<std::array<int, 3>>();
      const auto c = m.at("coefficient").get<std::array<double, 3>>();
      t.coefficient = Vec3(c[0], c[1], c[2]);
      t.phase = m.value("phase", 0.0);
      terms.push_back(t);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("perturbation mode: ") + e.what());
  }
  return TrigPolynomialField(std::move(terms));
}

std::string certificate_to_json(const DiophantineCertificate& c) {
  json j{{"beta", {c.beta[0], c.beta[1]}},
         {"m", c.exponent_m},
         {"c", c.constant_c},
         {"P", c.search_radius_P},
         {"p", c.minimizing_p}};
  return j.dump();
}

std::string fourier_to_json(const FourierSeries& fs) {
  json entries = json::array();
  for (const auto& [p, c] : fs.coefficients())
    entries.push_back({{"p", p}, {"re", c.real()}, {"im", c.imag()}});
  return json{{"dimension", fs.dimension()}, {"entries", entries}}.dump();
}

FourierSeries fourier_from_json(const std::string& text) {
  const json j = parse(text, "Fourier series");
  try {
    FourierSeries fs(j.at("dimension").get<int>());
    for (const json& e : j.at("entries"))
      fs.set(e.at("p").get<Frequency>(), {e.at("re").get<double>(), e.at("im").get<double>()});
    return fs;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("Fourier series: ") + e.what());
  }
}

void write_conjugacy(const ConjugacyResult& h, const std::filesystem::path& dir,
                     const std::string& stem, double tol) {
  std::filesystem::create_directories(dir);
  std::ofstream bin(dir / (stem + ".bin"), std::ios::binary);
  for (const VectorGrid3* g : {&h.displacement, &h.inverse_displacement})
    for (int c = 0; c < 3; ++c)
      for (const Vec3& v : g->values()) bin.write(reinterpret_cast<const char*>(&v[c]), sizeof(double));
  const json meta{{"N", h.displacement.resolution()},
                  {"tol", tol},
                  {"residual", h.residual},
                  {"offgrid_residual", h.offgrid_residual},
                  {"inverse_error", h.inverse_error},
                  {"iterations", h.iterations},
                  {"interpolation",
                   h.displacement.order() == Interpolation::Cubic ? "cubic" : "linear"},
                  {"layout", "component-major, index (i*N + j)*N + k, displacement then inverse"}};
  write_text(dir / (stem + ".json"), meta.dump(2) + "\n");
}

ConjugacyResult read_conjugacy(const std::filesystem::path& dir, const std::string& stem) {
  const json meta = parse(read_text(dir / (stem + ".json")), "conjugacy metadata");
  const int N = meta.at("N").get<int>();
  const Interpolation order =
      meta.value("interpolation", "cubic") == "cubic" ? Interpolation::Cubic : Interpolation::Linear;
  ConjugacyResult h;
  h.displacement = VectorGrid3(N, order);
  h.inverse_displacement = VectorGrid3(N, order);
  h.residual = meta.value("residual", 0.0);
  h.offgrid_residual = meta.value("offgrid_residual", 0.0);
  h.inverse_error = meta.value("inverse_error", 0.0);
  h.iterations = meta.value("iterations", 0);
  std::ifstream bin(dir / (stem + ".bin"), std::ios::binary);
  if (!bin) throw Error(ErrorCode::InvalidConfig, "missing grid dump for " + stem);
  for (VectorGrid3* g : {&h.displacement, &h.inverse_displacement})
    for (int c = 0; c < 3; ++c)
      for (Vec3& v : g->values()) bin.read(reinterpret_cast<char*>(&v[c]), sizeof(double));
  if (!bin) throw Error(ErrorCode::InvalidConfig, "grid dump for " + stem + " is truncated");
  return h;
}

void write_polyline(const std::filesystem::path& path, const std::vector<Vec3>& points,
                    const std::vector<double>& parameter) {
  CsvWriter csv(path, {"index", "s", "x", "y", "z"});
  for (std::size_t i = 0; i < points.size(); ++i)
    csv.row({double(i), i < parameter.size() ? parameter[i] : 0.0, points[i][0], points[i][1],
             points[i][2]});
}

}  // namespace anosov::io
