#include "specrank/matrix_io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <string_view>

#include "specrank/errors.hpp"

namespace specrank {

namespace {

using Record = std::vector<std::string>;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

std::optional<double> parse_number(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return std::nullopt;
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

// RFC-4180 reader: quoted fields may contain separators, doubled quotes and
// line breaks. Blank records are dropped.
std::vector<Record> read_records(std::istream& in, char sep) {
  std::vector<Record> records;
  Record current;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    current.push_back(field);
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    const bool blank = current.size() == 1 && trim(current[0]).empty();
    if (!blank) records.push_back(std::move(current));
    current.clear();
  };

  char ch;
  while (in.get(ch)) {
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get(ch);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(ch);
      }
      continue;
    }
    if (ch == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (ch == sep) {
      end_field();
    } else if (ch == '\n') {
      end_record();
    } else if (ch == '\r') {
      if (in.peek() == '\n') in.get(ch);
      end_record();
    } else {
      field.push_back(ch);
      if (!std::isspace(static_cast<unsigned char>(ch))) field_started = true;
    }
  }
  if (!field.empty() || !current.empty()) end_record();
  return records;
}

Eigen::MatrixXd parse_delimited(std::istream& in, char sep) {
  const auto records = read_records(in, sep);
  if (records.empty()) throw EmptyMatrix();

  std::size_t first = 0;
  const bool header = std::any_of(
      records[0].begin(), records[0].end(),
      [](const std::string& cell) { return !parse_number(cell).has_value(); });
  if (header) first = 1;
  if (records.size() <= first) throw EmptyMatrix();

  const std::size_t rows = records.size() - first;
  const std::size_t cols = records[first].size();
  Eigen::MatrixXd values(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const Record& rec = records[first + r];
    const std::size_t file_row = first + r + 1;
    if (rec.size() != cols) {
      const std::size_t bad = std::min(rec.size(), cols) + 1;
      throw ParseError(file_row, bad,
                       "expected " + std::to_string(cols) + " cells, found " +
                           std::to_string(rec.size()));
    }
    for (std::size_t c = 0; c < cols; ++c) {
      const auto v = parse_number(rec[c]);
      if (!v) {
        const auto cell = trim(rec[c]);
        throw ParseError(file_row, c + 1,
                         cell.empty() ? std::string("missing value")
                                      : "non-numeric cell '" +
                                            std::string(cell) + "'");
      }
      if (!std::isfinite(*v))
        throw ParseError(file_row, c + 1, "non-finite value");
      values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = *v;
    }
  }
  return values;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

// "%%MatrixMarket matrix array real general", entries in column-major order.
Eigen::MatrixXd parse_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw EmptyMatrix();
  std::istringstream banner(lower(line));
  std::string tag, object, layout, field, symmetry;
  banner >> tag >> object >> layout >> field >> symmetry;
  if (tag != "%%matrixmarket" || object != "matrix")
    throw ParseError(1, 1, "missing %%MatrixMarket matrix banner");
  if (layout != "array")
    throw ParseError(1, 3, "only the dense 'array' layout is supported");
  if (field != "real" && field != "double" && field != "integer")
    throw ParseError(1, 4, "unsupported field '" + field + "'");
  if (symmetry != "general")
    throw ParseError(1, 5, "only 'general' symmetry is supported");

  long rows = -1, cols = -1;
  while (std::getline(in, line)) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '%') continue;
    std::istringstream dims{std::string(t)};
    if (!(dims >> rows >> cols) || rows < 0 || cols < 0)
      throw ParseError(0, 0, "malformed size line '" + std::string(t) + "'");
    break;
  }
  if (rows <= 0 || cols <= 0) throw EmptyMatrix();

  Eigen::MatrixXd values(rows, cols);
  long index = 0;
  const long total = rows * cols;
  std::string token;
  while (index < total && in >> token) {
    if (token.front() == '%') {
      std::getline(in, line);
      continue;
    }
    const std::size_t r = static_cast<std::size_t>(index % rows) + 1;
    const std::size_t c = static_cast<std::size_t>(index / rows) + 1;
    const auto v = parse_number(token);
    if (!v) throw ParseError(r, c, "non-numeric entry '" + token + "'");
    if (!std::isfinite(*v)) throw ParseError(r, c, "non-finite value");
    values(index % rows, index / rows) = *v;
    ++index;
  }
  if (index < total)
    throw ParseError(static_cast<std::size_t>(index % rows) + 1,
                     static_cast<std::size_t>(index / rows) + 1,
                     "missing entry");
  return values;
}

}  // namespace

DataMatrix make_data_matrix(Eigen::MatrixXd values) {
  if (values.rows() == 0 || values.cols() == 0) throw EmptyMatrix();
  if (!values.allFinite()) throw InputError("matrix has non-finite entries");
  DataMatrix m;
  m.values = std::move(values);
  return m;
}

DataMatrix parse_matrix(std::istream& in, Format format,
                        Orientation orientation) {
  Eigen::MatrixXd values;
  switch (format) {
    case Format::csv:
      values = parse_delimited(in, ',');
      break;
    case Format::tsv:
      values = parse_delimited(in, '\t');
      break;
    case Format::matrix_market:
      values = parse_matrix_market(in);
      break;
  }
  if (orientation == Orientation::samples_as_columns)
    values.transposeInPlace();
  return make_data_matrix(std::move(values));
}

DataMatrix load_matrix(const std::filesystem::path& path, Format format,
                       Orientation orientation) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileNotFound(path.string());
  return parse_matrix(in, format, orientation);
}

Format format_from_extension(const std::filesystem::path& path) {
  const auto ext = lower(path.extension().string());
  if (ext == ".tsv" || ext == ".tab") return Format::tsv;
  if (ext == ".mtx" || ext == ".mm") return Format::matrix_market;
  return Format::csv;
}

DataMatrix center_columns(const DataMatrix& m) {
  DataMatrix out = m;
  if (m.centered) return out;
  // Second pass removes the rounding residue left when |mean| >> spread.
  for (int pass = 0; pass < 2; ++pass) {
    const Eigen::RowVectorXd means = out.values.colwise().mean();
    out.values.rowwise() -= means;
  }
  out.centered = true;
  return out;
}

StandardizeResult standardize_columns(const DataMatrix& m) {
  StandardizeResult result{center_columns(m), {}, {}};
  Eigen::MatrixXd& x = result.matrix.values;
  const double denom = std::max<double>(1.0, static_cast<double>(x.rows() - 1));
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double scale = x.col(j).cwiseAbs().maxCoeff();
    const double var = x.col(j).squaredNorm() / denom;
    if (scale == 0.0 || var <= 1e-24 * scale * scale) {
      x.col(j).setZero();
      result.constant_columns.push_back(j);
      result.warnings.push_back("column " + std::to_string(j + 1) +
                                " is constant; left as zeros");
      continue;
    }
    x.col(j) /= std::sqrt(var);
  }
  result.matrix.standardized = true;
  return result;
}

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

void write_csv(const DataMatrix& m, std::ostream& out, char sep) {
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.values.cols(); ++j) {
      if (j) out << sep;
      out << format_real(m.values(i, j));
    }
    out << '\n';
  }
}

void write_csv(const DataMatrix& m, const std::filesystem::path& path,
               char sep) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  write_csv(m, out, sep);
}

}  // namespace specrank
