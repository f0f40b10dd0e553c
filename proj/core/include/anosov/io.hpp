#pragma once

#include "anosov/conjugacy.hpp"
#include "anosov/fourier.hpp"
#include "anosov/lattice.hpp"
#include "anosov/torus_maps.hpp"

#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

namespace anosov::io {

/// Round-trip decimal form of v ("%.17g").
std::string number(double v);

/// Comma-separated file with a header row. Rows are written as they come.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
  void row(const std::vector<double>& values);
  void row(const std::vector<std::string>& cells);

 private:
  std::ofstream* out();
  std::filesystem::path path_;
  std::shared_ptr<std::ofstream> stream_;
  std::size_t columns_;
};

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// [[a, b, c], [d, e, f], [g, h, i]]
std::string matrix_to_json(const LatticeAutomorphism& L);
/// Three integer rows, without the unimodularity check.
IMat3 integer_matrix_from_json(const std::string& text);
LatticeAutomorphism matrix_from_json(const std::string& text);

/// [{"frequency": [k1, k2, k3], "coefficient": [c1, c2, c3], "phase": t}, ...]
std::string field_to_json(const TrigPolynomialField& u);
TrigPolynomialField field_from_json(const std::string& text);

/// {"beta": [b1, b2], "m": 2, "c": ..., "P": ..., "p": [p1, p2]}
std::string certificate_to_json(const DiophantineCertificate& c);

/// {"dimension": m, "entries": [{"p": [...], "re": .., "im": ..}, ...]}
std::string fourier_to_json(const FourierSeries& fs);
FourierSeries fourier_from_json(const std::string& text);

/// Binary grid dump (<stem>.bin: N^3 little-endian doubles per component,
/// displacement then inverse) with metadata in <stem>.json.
void write_conjugacy(const ConjugacyResult& h, const std::filesystem::path& dir,
                     const std::string& stem, double tol);
ConjugacyResult read_conjugacy(const std::filesystem::path& dir, const std::string& stem);

/// index, s, x, y, z (lifted coordinates).
void write_polyline(const std::filesystem::path& path, const std::vector<Vec3>& points,
                    const std::vector<double>& parameter);

}  // namespace anosov::io
