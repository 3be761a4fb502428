#include "repdyn/csv.hpp"

#include "repdyn/errors.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace repdyn {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream stream(line);
  while (std::getline(stream, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary: no newline translation
  if (!out) {
    throw error("cannot open " + path.string() + " for writing");
  }
  return out;
}

}  // namespace

std::string format_real(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

FeatureMatrix load_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw invalid_input_error("cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw invalid_input_error(path.string() + ": missing header row");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::size_t cols = split_line(line).size();
  if (cols == 0) {
    throw invalid_input_error(path.string() + ": header row has no columns");
  }

  std::vector<double> values;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_line(line);
    if (cells.size() != cols) {
      throw invalid_input_error(path.string() + ": row " + std::to_string(rows + 1) + " has " +
                                std::to_string(cells.size()) + " cells, expected " +
                                std::to_string(cols));
    }
    for (const std::string& cell : cells) {
      std::size_t consumed = 0;
      double parsed = 0.0;
      try {
        parsed = std::stod(cell, &consumed);
      } catch (const std::exception&) {
        throw invalid_input_error(path.string() + ": cannot parse '" + cell + "' as a real");
      }
      if (consumed != cell.size()) {
        throw invalid_input_error(path.string() + ": cannot parse '" + cell + "' as a real");
      }
      values.push_back(parsed);
    }
    ++rows;
  }
  if (rows == 0) {
    throw invalid_input_error(path.string() + ": no data rows");
  }
  Eigen::MatrixXd matrix(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) {
      matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * cols + j];
    }
  }
  return FeatureMatrix(std::move(matrix));
}

void write_feature_csv(const Eigen::MatrixXd& values, const std::vector<std::string>& columns,
                       const std::filesystem::path& path) {
  if (!columns.empty() && static_cast<Eigen::Index>(columns.size()) != values.cols()) {
    throw shape_error("column name count does not match the matrix width");
  }
  std::ofstream out = open_for_write(path);
  for (Eigen::Index j = 0; j < values.cols(); ++j) {
    if (j > 0) out << ',';
    if (columns.empty()) {
      out << 'f' << j;
    } else {
      out << columns[static_cast<std::size_t>(j)];
    }
  }
  out << '\n';
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_real(values(i, j));
    }
    out << '\n';
  }
}

void write_sweep_samples_csv(const SweepResult& result, const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "param,repeat,seed,mi,entropy_r,effective_rank_r\n";
  for (const SweepSample& s : result.samples) {
    out << format_real(s.param) << ',' << s.repeat << ',' << s.seed << ',' << format_real(s.mi)
        << ',' << format_real(s.entropy_r) << ',' << format_real(s.effective_rank_r) << '\n';
  }
}

void write_sweep_aggregate_csv(const SweepResult& result, const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "param,mi_mean,mi_std\n";
  for (const SweepPoint& p : result.aggregate) {
    out << format_real(p.param) << ',' << format_real(p.mi_mean) << ',' << format_real(p.mi_std)
        << '\n';
  }
}

void write_trajectory_csv(const std::vector<TrajectoryRecord>& trajectory,
                          const std::filesystem::path& path) {
  std::ofstream out = open_for_write(path);
  out << "epoch,loss_total,loss_nce,loss_vicreg,alpha,er_r,er_z,mi_rz,uniformity_r,"
         "uniformity_z\n";
  for (const TrajectoryRecord& r : trajectory) {
    out << r.epoch << ',' << format_real(r.loss_total) << ',' << format_real(r.loss_nce) << ','
        << format_real(r.loss_vicreg) << ',' << format_real(r.alpha) << ',' << format_real(r.er_r)
        << ',' << format_real(r.er_z) << ',' << format_real(r.mi_rz) << ','
        << format_real(r.uniformity_r) << ',' << format_real(r.uniformity_z) << '\n';
  }
}

}  // namespace repdyn
