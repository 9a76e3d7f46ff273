#include "presep/csv.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace presep {

std::string to_csv(const Matrix &m) {
  std::string out;
  out.reserve(static_cast<std::size_t>(m.size()) * 12);
  char buf[64];
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", m(i, j));
      if (j)
        out += ',';
      out += buf;
    }
    out += "\r\n";
  }
  return out;
}

void write_csv(const std::filesystem::path &path, const Matrix &m) {
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw IoError("cannot open for writing: " + path.string());
  f << to_csv(m);
  if (!f)
    throw IoError("write failed: " + path.string());
}

Matrix parse_csv(const std::string &text, const std::string &origin) {
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r')
      line.pop_back();
    if (line.empty())
      continue;
    std::vector<double> row;
    std::size_t pos = 0;
    std::size_t field_no = 0;
    while (pos <= line.size()) {
      ++field_no;
      std::size_t comma = line.find(',', pos);
      std::string field = line.substr(
          pos, comma == std::string::npos ? std::string::npos : comma - pos);
      errno = 0;
      char *end = nullptr;
      double v = std::strtod(field.c_str(), &end);
      if (end == field.c_str() || *end != '\0' || errno == ERANGE)
        throw IoError(origin + ":" + std::to_string(line_no) + ": field " +
                      std::to_string(field_no) + ": not a number: '" + field +
                      "'");
      row.push_back(v);
      if (comma == std::string::npos)
        break;
      pos = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw IoError(origin + ":" + std::to_string(line_no) + ": expected " +
                    std::to_string(rows.front().size()) + " fields, got " +
                    std::to_string(row.size()));
    rows.push_back(std::move(row));
  }
  if (rows.empty())
    throw IoError(origin + ": empty matrix");
  Matrix m(static_cast<Index>(rows.size()),
           static_cast<Index>(rows.front().size()));
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return m;
}

Matrix read_csv(const std::filesystem::path &path) {
  std::ifstream f(path, std::ios::binary);
  if (!f)
    throw IoError("cannot open: " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_csv(buf.str(), path.string());
}

} // namespace presep
