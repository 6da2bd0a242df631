#pragma once

#include "heatgraph/graphs.hpp"

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <vector>

namespace heatgraph {

/// Comma-separated rows, no header, 17 significant digits.
std::string format_matrix_csv(const Eigen::MatrixXd &m);
/// Parses what format_matrix_csv writes. Blank lines and lines starting with '#' are skipped.
Eigen::MatrixXd parse_matrix_csv(const std::string &text);

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path &path);
void write_matrix_csv(const std::filesystem::path &path, const Eigen::MatrixXd &m);

/// Header src,dst,weight; one row per edge with src < dst, 0-indexed.
std::string format_edge_list_csv(const WeightMatrix &w);
void write_edge_list_csv(const std::filesystem::path &path, const WeightMatrix &w);

Laplacian read_laplacian_csv(const std::filesystem::path &path);

std::string read_text_file(const std::filesystem::path &path);
void write_text_file(const std::filesystem::path &path, const std::string &text);

/// One value per line, 17 significant digits.
std::string format_vector_csv(const std::vector<double> &values);

} // namespace heatgraph
