#include "heatgraph/csv_io.hpp"

#include "heatgraph/errors.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace heatgraph {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double parse_double(const std::string &field, std::size_t line_no) {
    double v = 0.0;
    const char *begin = field.data();
    const char *end = begin + field.size();
    const auto [ptr, ec] = std::from_chars(begin, end, v);
    if (field.empty() || ec != std::errc() || ptr != end)
        throw IoError("csv line " + std::to_string(line_no) + ": cannot parse '" + field + "'");
    return v;
}

} // namespace

std::string format_matrix_csv(const Eigen::MatrixXd &m) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (j) os << ',';
            os << m(i, j);
        }
        os << '\n';
    }
    return os.str();
}

Eigen::MatrixXd parse_matrix_csv(const std::string &text) {
    std::vector<std::vector<double>> rows;
    std::istringstream is(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        std::vector<double> row;
        std::istringstream ls(t);
        std::string field;
        while (std::getline(ls, field, ',')) row.push_back(parse_double(trim(field), line_no));
        if (t.back() == ',') throw IoError("csv line " + std::to_string(line_no) + ": trailing comma");
        if (!rows.empty() && row.size() != rows.front().size())
            throw IoError("csv line " + std::to_string(line_no) + ": expected " +
                          std::to_string(rows.front().size()) + " fields, got " + std::to_string(row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw IoError("csv: no data rows");
    Eigen::MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j) m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return m;
}

std::string read_text_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream os;
    os << in.rdbuf();
    if (in.bad()) throw IoError("failed reading " + path.string());
    return os.str();
}

void write_text_file(const std::filesystem::path &path, const std::string &text) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing " + path.string());
}

Eigen::MatrixXd read_matrix_csv(const std::filesystem::path &path) {
    try {
        return parse_matrix_csv(read_text_file(path));
    } catch (const IoError &e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_matrix_csv(const std::filesystem::path &path, const Eigen::MatrixXd &m) {
    write_text_file(path, format_matrix_csv(m));
}

std::string format_edge_list_csv(const WeightMatrix &w) {
    std::ostringstream os;
    os << std::setprecision(17) << "src,dst,weight\n";
    const Eigen::MatrixXd &m = w.matrix();
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = i + 1; j < m.cols(); ++j)
            if (m(i, j) != 0.0) os << i << ',' << j << ',' << m(i, j) << '\n';
    return os.str();
}

void write_edge_list_csv(const std::filesystem::path &path, const WeightMatrix &w) {
    write_text_file(path, format_edge_list_csv(w));
}

Laplacian read_laplacian_csv(const std::filesystem::path &path) {
    Eigen::MatrixXd m = read_matrix_csv(path);
    if (m.rows() != m.cols())
        throw IoError(path.string() + ": Laplacian must be square, got " + std::to_string(m.rows()) + "x" +
                      std::to_string(m.cols()));
    return Laplacian(std::move(m));
}

std::string format_vector_csv(const std::vector<double> &values) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (double v : values) os << v << '\n';
    return os.str();
}

} // namespace heatgraph
