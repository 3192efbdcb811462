#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace specrank {

/// Dense n x p data matrix, rows are samples and columns are features.
struct DataMatrix {
  Eigen::MatrixXd values;
  bool centered = false;
  bool standardized = false;

  Eigen::Index n() const { return values.rows(); }
  Eigen::Index p() const { return values.cols(); }
};

enum class Format { csv, tsv, matrix_market };
enum class Orientation { samples_as_rows, samples_as_columns };

/// Wraps raw values, checking non-emptiness and finiteness.
DataMatrix make_data_matrix(Eigen::MatrixXd values);

/// Reads a dense numeric matrix. CSV/TSV files may carry one header row,
/// detected by a non-numeric cell in the first record. With
/// samples_as_columns the file is transposed on load.
///
/// Throws FileNotFound, ParseError(row, col) with 1-based file coordinates,
/// or EmptyMatrix.
DataMatrix load_matrix(const std::filesystem::path& path, Format format,
                       Orientation orientation = Orientation::samples_as_rows);

/// Parses from an in-memory stream; same rules as load_matrix.
DataMatrix parse_matrix(std::istream& in, Format format,
                        Orientation orientation = Orientation::samples_as_rows);

/// Guesses the format from the file extension (.tsv, .mtx/.mm, else csv).
Format format_from_extension(const std::filesystem::path& path);

/// Subtracts column means. Idempotent.
DataMatrix center_columns(const DataMatrix& m);

struct StandardizeResult {
  DataMatrix matrix;
  /// Zero-variance columns, left as zeros.
  std::vector<Eigen::Index> constant_columns;
  std::vector<std::string> warnings;
};

/// Scales each column of a centered matrix to unit sample variance
/// (denominator n - 1). Centers first if needed.
StandardizeResult standardize_columns(const DataMatrix& m);

/// Renders a double with 17 significant digits.
std::string format_real(double value);

void write_csv(const DataMatrix& m, std::ostream& out, char sep = ',');
void write_csv(const DataMatrix& m, const std::filesystem::path& path,
               char sep = ',');

}  // namespace specrank
